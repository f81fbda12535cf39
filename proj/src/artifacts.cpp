#include "adia/artifacts.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace adia {

using ordered_json = nlohmann::ordered_json;

std::string tool_version() { return "adia-strips 0.1.0"; }

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) ss << ((h >> shift) & 0xF);
  return ss.str();
}

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArtifactError("cannot write artifact: " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot read artifact: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_strip_csv(const std::string& path, const StripField& u, int dim) {
  std::ostringstream out;
  out << "s,t";
  for (int c = 0; c < dim; ++c) out << ",q" << (c + 1);
  for (int c = 0; c < dim; ++c) out << ",p" << (c + 1);
  out << "\n";
  for (int i = 0; i <= u.Ns; ++i)
    for (int j = 0; j <= u.Nt; ++j) {
      out << format_double(u.s_of(i)) << ',' << format_double(u.t_of(j));
      for (int c = 0; c < dim; ++c) out << ',' << format_double(u.q[c](i, j));
      for (int c = 0; c < dim; ++c) out << ',' << format_double(u.p[c](i, j));
      out << "\n";
    }
  write_text(path, out.str());
}

std::pair<StripField, int> read_strip_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError("strip csv empty: " + path);
  int ncols = 1;
  for (char c : line)
    if (c == ',') ++ncols;
  if (ncols != 4 && ncols != 6) throw ArtifactError("strip csv has unexpected column count");
  const int dim = (ncols - 2) / 2;

  std::vector<std::array<double, 6>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 6> vals{};
    std::istringstream ls(line);
    std::string item;
    int k = 0;
    while (std::getline(ls, item, ',')) {
      if (k >= ncols) throw ArtifactError("strip csv row too long at line " + std::to_string(lineno));
      char* end = nullptr;
      vals[k] = std::strtod(item.c_str(), &end);
      if (end == item.c_str()) throw ArtifactError("strip csv bad number at line " + std::to_string(lineno));
      ++k;
    }
    if (k != ncols) throw ArtifactError("strip csv truncated row at line " + std::to_string(lineno));
    rows.push_back(vals);
  }
  if (rows.empty()) throw ArtifactError("strip csv has no data rows: " + path);

  // infer grid: rows are written i-major, j-minor
  int nt = 0;
  while (nt + 1 < static_cast<int>(rows.size()) && rows[nt + 1][0] == rows[0][0]) ++nt;
  const int cols = nt + 1;
  if (rows.size() % cols != 0) throw ArtifactError("strip csv node count is not a full grid");
  const int ns = static_cast<int>(rows.size()) / cols - 1;
  if (ns < 2 || nt < 2) throw ArtifactError("strip csv grid too small");
  const double r = -rows[0][0];

  StripField u(r, ns, nt);
  for (int i = 0; i <= ns; ++i)
    for (int j = 0; j <= nt; ++j) {
      const auto& v = rows[static_cast<size_t>(i) * cols + j];
      for (int c = 0; c < dim; ++c) {
        u.q[c](i, j) = v[2 + c];
        u.p[c](i, j) = v[2 + dim + c];
      }
    }
  return {u, dim};
}

void write_gamma_csv(const std::string& path, const GammaProfile& prof) {
  std::ostringstream out;
  out << "s,gamma,dgamma,ddgamma,dirichlet,envelope\n";
  const double Keps2 = prof.measured_K * prof.eps * prof.eps;
  for (size_t i = 0; i < prof.s.size(); ++i) {
    double s = prof.s[i];
    double env = prof.C1 * std::exp(-prof.delta * (prof.R + s)) +
                 prof.C2 * std::exp(-prof.delta * (prof.R - s)) + prof.C3 * Keps2;
    out << format_double(s) << ',' << format_double(prof.gamma[i]) << ','
        << format_double(prof.dgamma[i]) << ',' << format_double(prof.ddgamma[i]) << ','
        << format_double(prof.dirichlet[i]) << ',' << format_double(env) << "\n";
  }
  write_text(path, out.str());
}

void write_table_csv(const std::string& path, const ConvergenceTable& table) {
  std::ostringstream out;
  out << "eps,r,ns,nt,converged,newton_iters,residual,sup_dist,energy,stokes_energy,"
         "morse_energy,measured_K,measured_kappa\n";
  for (const auto& row : table.rows) {
    out << format_double(row.eps) << ',' << format_double(row.r) << ',' << row.Ns << ','
        << row.Nt << ',' << (row.converged ? 1 : 0) << ',' << row.newton_iters << ','
        << format_double(row.residual) << ',' << format_double(row.sup_dist) << ','
        << format_double(row.energy) << ',' << format_double(row.stokes) << ','
        << format_double(row.morse_energy) << ',' << format_double(row.measured_K) << ','
        << format_double(row.measured_kappa) << "\n";
  }
  write_text(path, out.str());
}

void write_flowpath_csv(const std::string& path, const FlowPath& fp, int dim) {
  std::ostringstream out;
  out << "sigma";
  for (int c = 0; c < dim; ++c) out << ",q" << (c + 1);
  out << ",segment_id\n";
  double sigma = 0.0;
  for (size_t k = 0; k < fp.segments.size(); ++k) {
    const auto& seg = fp.segments[k];
    for (size_t m = 0; m < seg.samples.size(); ++m) {
      out << format_double(sigma + static_cast<double>(m) * seg.step);
      for (int c = 0; c < dim; ++c) out << ',' << format_double(seg.samples[m][c]);
      out << ',' << k << "\n";
    }
    sigma += seg.step * (static_cast<double>(seg.samples.size()) - 1.0);
  }
  write_text(path, out.str());
}

void write_report_json(const std::string& path, const SolveReport& rep, double eps, double r,
                       int Ns, int Nt) {
  ordered_json j;
  j["status"] = rep.status == SolveStatus::converged
                    ? "converged"
                    : (rep.status == SolveStatus::diverged ? "diverged" : "singular_jacobian");
  j["residual_norm"] = rep.residual_norm;
  j["newton_iters"] = rep.newton_iters;
  j["energy"] = rep.energy;
  j["sup_dQ"] = rep.sup_dQ;
  j["sup_dP"] = rep.sup_dP;
  j["singular_flag"] = rep.singular_flag;
  j["message"] = rep.message;
  j["eps"] = eps;
  j["r"] = r;
  j["ns"] = Ns;
  j["nt"] = Nt;
  write_text(path, j.dump(2) + "\n");
}

void write_estimate_json(const std::string& path, const GammaProfile& prof,
                         const EstimateReport& rep) {
  ordered_json j;
  j["delta"] = prof.delta;
  j["eps"] = prof.eps;
  j["R"] = prof.R;
  j["measured_K"] = prof.measured_K;
  j["slack"] = prof.slack;
  j["C1"] = prof.C1;
  j["C2"] = prof.C2;
  j["C3"] = prof.C3;
  j["inequality_holds"] = rep.inequality_holds;
  j["violations"] = rep.violations;
  j["c1_kappa"] = rep.c1_kappa;
  j["d_rate"] = rep.d_rate;
  write_text(path, j.dump(2) + "\n");
}

void write_table_json(const std::string& path, const ConvergenceTable& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r;
    r["eps"] = row.eps;
    r["r"] = row.r;
    r["ns"] = row.Ns;
    r["nt"] = row.Nt;
    r["converged"] = row.converged;
    r["newton_iters"] = row.newton_iters;
    r["residual"] = row.residual;
    r["sup_dist"] = row.sup_dist;
    r["energy"] = row.energy;
    r["stokes_energy"] = row.stokes;
    r["morse_energy"] = row.morse_energy;
    r["measured_K"] = row.measured_K;
    r["measured_kappa"] = row.measured_kappa;
    rows.push_back(r);
  }
  ordered_json j;
  j["rows"] = rows;
  j["trend_ok"] = table.trend_ok;
  j["hbar"] = table.hbar;
  j["note"] = table.note;
  write_text(path, j.dump(2) + "\n");
}

void write_flowpath_json(const std::string& path, const FlowPath& fp, const MorseData& f) {
  ordered_json crit = ordered_json::array();
  for (const auto& cp : fp.crossed_criticals) {
    ordered_json c;
    c["q"] = {cp.location[0], cp.location[1]};
    c["index"] = cp.index;
    c["f"] = f.f(cp.location);
    crit.push_back(c);
  }
  ordered_json j;
  switch (fp.kind) {
    case FlowKind::finite: j["kind"] = "finite"; break;
    case FlowKind::half_infinite_pos: j["kind"] = "half_infinite_pos"; break;
    case FlowKind::half_infinite_neg: j["kind"] = "half_infinite_neg"; break;
    case FlowKind::bi_infinite: j["kind"] = "bi_infinite"; break;
    case FlowKind::broken: j["kind"] = "broken"; break;
  }
  j["segments"] = fp.segments.size();
  j["breaks"] = fp.crossed_criticals.size();
  j["crossed_criticals"] = crit;
  j["x_minus"] = {fp.x_minus[0], fp.x_minus[1]};
  j["x_plus"] = {fp.x_plus[0], fp.x_plus[1]};
  j["diagnostic"] = fp.diagnostic;
  write_text(path, j.dump(2) + "\n");
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_y) {
  const double W = 800, H = 500, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : series)
    for (size_t k = 0; k < s.x.size(); ++k) {
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, ty(s.y[k]));
      ymax = std::max(ymax, ty(s.y[k]));
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (ymax - ymin < 1e-12) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (ty(y) - ymin) / (ymax - ymin) * (H - mt - mb); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n";
  out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(W - ml - mr)
      << "\" height=\"" << fmt(H - mt - mb)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // axis labels: 5 ticks per axis
  for (int k = 0; k <= 4; ++k) {
    double x = xmin + (xmax - xmin) * k / 4.0;
    double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(H - mb + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(std::round(x * 1e4) / 1e4) << "</text>\n";
    double yy = H - mb - (yv - ymin) / (ymax - ymin) * (H - mt - mb);
    out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(yy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << (log_y ? ("1e" + format_double(std::round(yv * 100) / 100))
                  : format_double(std::round(yv * 1e4) / 1e4))
        << "</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[ci % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t k = 0; k < s.x.size(); ++k) {
      if (k) out << ' ';
      out << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << fmt(W - mr - 8) << "\" y=\"" << fmt(mt + 16 + 16 * ci)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << colors[ci % 6] << "\">" << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  write_text(path, out.str());
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_path, const std::string& config_text,
                    std::uint64_t seed, double wall_time_s,
                    const std::vector<std::string>& artifact_names) {
  ordered_json arts = ordered_json::array();
  for (const auto& name : artifact_names) {
    ordered_json a;
    a["name"] = name;
    a["fnv1a64"] = fnv1a64_hex(read_text(dir + "/" + name));
    arts.push_back(a);
  }
  ordered_json j;
  j["command"] = command;
  j["config_path"] = config_path;
  j["config_fnv1a64"] = fnv1a64_hex(config_text);
  j["output_dir"] = dir;
  j["seed"] = seed;
  j["tool_version"] = tool_version();
  j["wall_time_s"] = wall_time_s;
  j["artifacts"] = arts;
  write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace adia
