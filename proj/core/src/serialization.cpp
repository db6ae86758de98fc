#include "heatguide/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "heatguide/json_canonical.hpp"

namespace heatguide {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad floating-point literal: '" + std::string(s) + "'");
  }
  return v;
}

namespace {

void dump_rec(const nlohmann::json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) { // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_rec(v, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

} // namespace

std::string canonical_json_dump(const nlohmann::json& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

std::string canonical_json_hash(const nlohmann::json& j) {
  const std::string text = canonical_json_dump(j);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

namespace {

const char* gamma_side_name(GammaSide s) {
  return s == GammaSide::RightEnd ? "right" : "left";
}

GammaSide gamma_side_from_name(const std::string& s) {
  if (s == "right") return GammaSide::RightEnd;
  if (s == "left") return GammaSide::LeftEnd;
  throw std::invalid_argument("gamma_side must be 'left' or 'right', got '" + s + "'");
}

} // namespace

std::string to_json(const ModalField& f) {
  nlohmann::json j;
  j["a"] = f.cross_section().a;
  j["gamma_side"] = gamma_side_name(f.cross_section().gamma_side);
  j["l_max"] = f.cross_section().l_max;
  j["k_max"] = f.kgrid().k_max;
  j["n_k"] = f.kgrid().n_k;
  nlohmann::json coeffs = nlohmann::json::array();
  for (int jk = 0; jk < f.kgrid().n_k; ++jk) {
    for (int ell = 1; ell <= f.cross_section().l_max; ++ell) {
      const auto c = f.at(jk, ell);
      coeffs.push_back(nlohmann::json::array({c.real(), c.imag()}));
    }
  }
  j["coeffs"] = std::move(coeffs);
  return canonical_json_dump(j);
}

ModalField modal_field_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CrossSection cs{j.at("a").get<double>(), gamma_side_from_name(j.at("gamma_side").get<std::string>()),
                  j.at("l_max").get<int>()};
  KGrid kg{j.at("k_max").get<double>(), j.at("n_k").get<int>()};
  ModalField f(cs, kg);
  const auto& coeffs = j.at("coeffs");
  const std::size_t expected = static_cast<std::size_t>(kg.n_k) * cs.l_max;
  if (coeffs.size() != expected) {
    throw std::invalid_argument("coeffs length " + std::to_string(coeffs.size()) +
                                " does not match lattice size " + std::to_string(expected));
  }
  std::size_t idx = 0;
  for (int jk = 0; jk < kg.n_k; ++jk) {
    for (int ell = 1; ell <= cs.l_max; ++ell, ++idx) {
      const auto& pair = coeffs[idx];
      f.set(jk, ell, {pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
  }
  return f;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("write failed for '" + path + "'");
}

void save_modal_field(const std::string& path, const ModalField& f) {
  write_text_file(path, to_json(f));
}

ModalField load_modal_field(const std::string& path) {
  return modal_field_from_json(read_text_file(path));
}

std::string trace_csv(const NeumannTrace& d) {
  std::string out = "k_index,t_index,re,im\n";
  for (int j = 0; j < d.kgrid().n_k; ++j) {
    for (int i = 0; i <= d.time_grid().n_t; ++i) {
      const auto z = d.at(j, i);
      out += std::to_string(j) + "," + std::to_string(i) + "," + format_double(z.real()) +
             "," + format_double(z.imag()) + "\n";
    }
  }
  return out;
}

std::string trace_sidecar_json(const NeumannTrace& d) {
  nlohmann::json j;
  j["T"] = d.time_grid().T;
  j["n_t"] = d.time_grid().n_t;
  j["k_max"] = d.kgrid().k_max;
  j["n_k"] = d.kgrid().n_k;
  nlohmann::json prov;
  if (d.provenance().noisy) {
    prov["kind"] = "noisy";
    prov["delta"] = d.provenance().delta;
    prov["seed"] = d.provenance().seed;
  } else {
    prov["kind"] = "clean";
  }
  j["provenance"] = std::move(prov);
  return canonical_json_dump(j);
}

NeumannTrace trace_from_strings(const std::string& csv, const std::string& sidecar) {
  const nlohmann::json j = nlohmann::json::parse(sidecar);
  TimeGrid tg{j.at("T").get<double>(), j.at("n_t").get<int>()};
  KGrid kg{j.at("k_max").get<double>(), j.at("n_k").get<int>()};
  NeumannTrace d(kg, tg);
  TraceProvenance prov;
  const auto& pj = j.at("provenance");
  if (pj.at("kind").get<std::string>() == "noisy") {
    prov.noisy = true;
    prov.delta = pj.at("delta").get<double>();
    prov.seed = pj.at("seed").get<std::uint64_t>();
  }
  d.set_provenance(prov);

  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "k_index,t_index,re,im") {
    throw std::invalid_argument("trace CSV header mismatch");
  }
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t p1 = line.find(',');
    std::size_t p2 = line.find(',', p1 + 1);
    std::size_t p3 = line.find(',', p2 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos) {
      throw std::invalid_argument("malformed trace CSV row: '" + line + "'");
    }
    const int jk = std::stoi(line.substr(0, p1));
    const int ti = std::stoi(line.substr(p1 + 1, p2 - p1 - 1));
    const double re = parse_double(std::string_view(line).substr(p2 + 1, p3 - p2 - 1));
    const double im = parse_double(std::string_view(line).substr(p3 + 1));
    d.set(jk, ti, {re, im});
    ++rows;
  }
  const std::size_t expected = static_cast<std::size_t>(kg.n_k) * tg.n_nodes();
  if (rows != expected) {
    throw std::invalid_argument("trace CSV has " + std::to_string(rows) + " rows, expected " +
                                std::to_string(expected));
  }
  return d;
}

void save_trace(const std::string& csv_path, const std::string& sidecar_path,
                const NeumannTrace& d) {
  write_text_file(csv_path, trace_csv(d));
  write_text_file(sidecar_path, trace_sidecar_json(d));
}

NeumannTrace load_trace(const std::string& csv_path, const std::string& sidecar_path) {
  return trace_from_strings(read_text_file(csv_path), read_text_file(sidecar_path));
}

} // namespace heatguide
