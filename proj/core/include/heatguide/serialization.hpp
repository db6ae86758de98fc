#ifndef HEATGUIDE_SERIALIZATION_HPP
#define HEATGUIDE_SERIALIZATION_HPP

#include <string>
#include <string_view>

#include "heatguide/forward.hpp"
#include "heatguide/modal_field.hpp"

namespace heatguide {

/// I/O failure with the offending path in the message.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// 17-significant-digit, locale-independent rendering; round-trips exactly.
std::string format_double(double v);
double parse_double(std::string_view s);

/// ModalField as canonical JSON: {a, gamma_side, l_max, k_max, n_k, coeffs}
/// with coeffs an array of [re, im] in row-major (j, ell) order. Exact
/// round-trip.
std::string to_json(const ModalField& f);
ModalField modal_field_from_json(const std::string& text);
void save_modal_field(const std::string& path, const ModalField& f);
ModalField load_modal_field(const std::string& path);

/// NeumannTrace as CSV (header k_index,t_index,re,im) plus a JSON sidecar
/// {T, n_t, k_max, n_k, provenance}; the sidecar round-trips bit-exactly.
std::string trace_csv(const NeumannTrace& d);
std::string trace_sidecar_json(const NeumannTrace& d);
NeumannTrace trace_from_strings(const std::string& csv, const std::string& sidecar);
void save_trace(const std::string& csv_path, const std::string& sidecar_path,
                const NeumannTrace& d);
NeumannTrace load_trace(const std::string& csv_path, const std::string& sidecar_path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace heatguide

#endif
