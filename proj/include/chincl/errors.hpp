#pragma once

#include <stdexcept>
#include <string>

namespace chincl {

/// Failure categories raised by the library. Every throwing operation
/// documents which of these it can produce.
enum class errc {
  negative_entry,
  row_sum,
  empty_matrix,
  shape_mismatch,
  size_overflow,
  size_limit,
  not_doubly_stochastic,
  not_circulant,
  not_symmetric,
  unsupported_size,
  no_circulant_form,
  out_of_range,
  no_convergence,
  infeasible,
  unbounded,
  iteration_limit,
  rank_deficient,
  index_out_of_range,
  parse_error,
};

const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace chincl
