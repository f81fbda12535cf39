#ifndef ADIA_ARTIFACTS_HPP
#define ADIA_ARTIFACTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adia/estimates.hpp"
#include "adia/lab.hpp"
#include "adia/morse_flow.hpp"
#include "adia/newton.hpp"

namespace adia {

struct ArtifactError : std::runtime_error {
  explicit ArtifactError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest round-trip decimal form of a double ('.' decimal, no locale).
std::string format_double(double v);

/// FNV-1a 64-bit content hash, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

// CSV files: comma separators, header row, LF endings.
void write_strip_csv(const std::string& path, const StripField& u, int dim);
std::pair<StripField, int> read_strip_csv(const std::string& path);

void write_gamma_csv(const std::string& path, const GammaProfile& prof);
void write_table_csv(const std::string& path, const ConvergenceTable& table);
void write_flowpath_csv(const std::string& path, const FlowPath& fp, int dim);

// JSON artifacts use stable key order (UTF-8, LF).
void write_report_json(const std::string& path, const SolveReport& rep, double eps, double r,
                       int Ns, int Nt);
void write_estimate_json(const std::string& path, const GammaProfile& prof,
                         const EstimateReport& rep);
void write_table_json(const std::string& path, const ConvergenceTable& table);
void write_flowpath_json(const std::string& path, const FlowPath& fp, const MorseData& f);

/// Polyline plot; fixed 800x500 viewbox, one polyline per series.
struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_y = false);

/// Run manifest: one per output directory; references every artifact with a
/// content hash. Wall time lives here (and only here).
void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_path, const std::string& config_text,
                    std::uint64_t seed, double wall_time_s,
                    const std::vector<std::string>& artifact_names);

std::string tool_version();

}  // namespace adia

#endif
