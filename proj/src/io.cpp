#include "chincl/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace chincl {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Channel channel_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("p"))
    fail(errc::parse_error, "channel JSON needs rows/cols/p");
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& p = j.at("p");
  if (!p.is_array() || static_cast<Index>(p.size()) != rows)
    fail(errc::parse_error, "p must hold exactly `rows` rows");
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = p.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      fail(errc::parse_error, "row " + std::to_string(i) + " must hold `cols` entries");
    for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return Channel::validate(m);
}

Channel channel_from_csv_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string tok = line.substr(pos, comma - pos);
      double v = 0.0;
      const char* begin = tok.data();
      const char* end = tok.data() + tok.size();
      while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
      while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
      const auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc{} || res.ptr != end)
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      row.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(errc::parse_error, "line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(errc::parse_error, "empty CSV");
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      m(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  return Channel::validate(m);
}

Channel load_channel(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::parse_error, "cannot open " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) fail(errc::parse_error, "empty file " + path);
  if (text[first] == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(errc::parse_error, "malformed JSON in " + path);
    return channel_from_json(j);
  }
  return channel_from_csv_text(text);
}

json channel_to_json(const Channel& k) {
  json rows = json::array();
  for (Index i = 0; i < k.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < k.cols(); ++j) row.push_back(k(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", k.rows()}, {"cols", k.cols()}, {"p", std::move(rows)}};
}

void save_channel_json(const Channel& k, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(errc::parse_error, "cannot write " + path);
  os << channel_to_json(k).dump(2) << "\n";
}

json pure_to_json(const PureChannel& p) {
  return json{{"rows", p.rows()}, {"cols", p.cols()}, {"map", p.map()}};
}

PureChannel pure_from_json(const json& j) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("map"))
    fail(errc::parse_error, "pure channel JSON needs rows/cols/map");
  return PureChannel(j.at("rows").get<Index>(), j.at("cols").get<Index>(),
                     j.at("map").get<std::vector<Index>>());
}

json certificate_to_json(const InclusionCertificate& cert) {
  json atoms = json::array();
  for (const auto& pair : cert.atoms)
    atoms.push_back(json{{"pre", pure_to_json(pair.pre)}, {"post", pure_to_json(pair.post)}});
  return json{{"atom_indices", cert.atom_indices},
              {"weights", cert.weights},
              {"atoms", std::move(atoms)},
              {"residual_inf", cert.residual_inf}};
}

InclusionCertificate certificate_from_json(const json& j) {
  InclusionCertificate cert;
  if (j.contains("atom_indices")) cert.atom_indices = j.at("atom_indices").get<std::vector<std::size_t>>();
  cert.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& a : j.at("atoms"))
    cert.atoms.push_back(PurePair{pure_from_json(a.at("pre")), pure_from_json(a.at("post"))});
  if (cert.atoms.size() != cert.weights.size())
    fail(errc::parse_error, "certificate atom/weight count mismatch");
  cert.residual_inf = j.value("residual_inf", 0.0);
  return cert;
}

InclusionCertificate load_certificate(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::parse_error, "cannot open " + path);
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) fail(errc::parse_error, "malformed JSON in " + path);
  return certificate_from_json(j);
}

void save_certificate(const InclusionCertificate& cert, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(errc::parse_error, "cannot write " + path);
  os << certificate_to_json(cert).dump(2) << "\n";
}

json outcome_to_json(const OmpOutcome& out) {
  return json{{"f", out.f},          {"s1", out.s1},
              {"lambda", out.lambda}, {"g", out.g},
              {"t_act", out.t_act},   {"residue_inf", out.residue_inf}};
}

}  // namespace chincl
