#pragma once

#include <string>
#include <vector>

#include "cflm/estimates.hpp"
#include "cflm/solver.hpp"

namespace cflm {

struct SnapshotMeta {
    double a = 0.0;
    double kappa = 0.0;
    double t = 0.0;
};

// Norm records as CSV with header "t,p,k1,k2,k3,value"; p = infinity is
// written as "inf"; doubles carry 17 significant digits so the round trip is
// value-exact. Writes are atomic (write then rename).
void write_norm_csv(const std::vector<NormRecord>& records, const std::string& path);
std::vector<NormRecord> read_norm_csv(const std::string& path);

// Raw little-endian snapshot: magic "CFLM1", u32 version, u32 n_x,n_y,n_z,
// f64 l_x,l_y,l_z, f64 a, kappa, t, frame_tilt, then row-major (x fastest)
// f64 samples. Bit-exact round trip; size/magic/version mismatches are
// refused.
void write_snapshot(const Field& field, const SnapshotMeta& meta, const std::string& path);
std::pair<Field, SnapshotMeta> read_snapshot(const std::string& path);

void write_rate_reports_csv(const std::vector<RateReport>& reports, const std::string& path);

std::string format_certificate(const InequalityCertificate& cert);
std::string format_rate_report(const RateReport& rep);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace cflm
