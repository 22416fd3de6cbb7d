#pragma once

#include "profex/profiles.hpp"
#include "profex/types.hpp"

#include <string>
#include <vector>

namespace profex {

// 17-significant-digit decimal formatting shared by all data artifacts.
std::string format_real(double v);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  Index column(const std::string& name) const;  // -1 when absent
};

// Parse errors carry the 1-based line number.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

// Profile curve artifact: eta[, eta_2], sup, inf, argmax_1.., argmin_1..
void write_curve_csv(const std::string& path, const ProfileCurve& curve);
void write_map_csv(const std::string& path, const ProfileMap& map);

// Envelope artifact (one per curve side): the curve schema joined with
// q_lo, q_hi, u_lo, u_hi, sigma_delta.
struct EnvelopeColumns {
  Vector q_lo, q_hi, u_lo, u_hi, sigma_delta;
};
void write_envelope_csv(const std::string& path, const ProfileCurve& curve, bool sup_side,
                        const EnvelopeColumns& env);
void write_map_envelope_csv(const std::string& path, const ProfileMap& map, bool sup_side,
                            const EnvelopeColumns& env);

}  // namespace profex
