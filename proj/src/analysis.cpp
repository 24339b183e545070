#include "cutstokes/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace cutstokes {

namespace {

/// High fixed degree: the exact fields are smooth but not polynomial, and
/// the clipped-polygon rules are cheap at the mesh sizes studied here.
constexpr int kErrorDegree = 12;

/// sum over supported elements of int_{T cap Omega_h} f(t, p) with weights.
template <class PointTerm>
double integrate(const FeSpace& V, PointTerm&& term) {
  const ActiveMesh& am = *V.am;
  double total = 0;
  for (int t : am.active_elems) {
    if (!V.elem_supported[t]) continue;
    const auto rule = element_inside_rule(am, t, kErrorDegree);
    for (std::size_t q = 0; q < rule.size(); ++q)
      total += rule.weights[q] * term(t, rule.points[q]);
  }
  return total;
}

double format_guard(double v) { return std::isfinite(v) ? v : 0.0; }

void fmt(std::string& out, const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  out += buf;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

double error_l2(const FeSpace& V, const std::vector<double>& u,
                const ScalarField& exact) {
  return std::sqrt(integrate(V, [&](int t, Vec2 p) {
    const double d = exact(p) - eval_scalar(V, u, t, p);
    return d * d;
  }));
}

double error_l2(const FeSpace& V, const std::vector<double>& u,
                const VectorField& exact) {
  return std::sqrt(integrate(V, [&](int t, Vec2 p) {
    const Vec2 d = exact(p) - eval_vector(V, u, t, p);
    return d.dot(d);
  }));
}

double error_l2_gradient(const FeSpace& V, const std::vector<double>& u,
                         const MatrixField& exact_grad) {
  return std::sqrt(integrate(V, [&](int t, Vec2 p) {
    const Mat2 g = eval_grad_vector(V, u, t, p);
    const Mat2 e = exact_grad(p);
    const Mat2 d{e.a11 - g.a11, e.a12 - g.a12, e.a21 - g.a21, e.a22 - g.a22};
    return d.frobenius2();
  }));
}

double pressure_error_l2(const FeSpace& Q, const std::vector<double>& p,
                         const ScalarField& exact) {
  double area = 0, mean_gap = 0;
  const ActiveMesh& am = *Q.am;
  for (int t : am.active_elems) {
    if (!Q.elem_supported[t]) continue;
    const auto rule = element_inside_rule(am, t, kErrorDegree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      area += rule.weights[q];
      mean_gap += rule.weights[q] *
                  (exact(rule.points[q]) - eval_scalar(Q, p, t, rule.points[q]));
    }
  }
  const double shift = area > 0 ? mean_gap / area : 0.0;
  return std::sqrt(integrate(Q, [&](int t, Vec2 pt) {
    const double d = exact(pt) - shift - eval_scalar(Q, p, t, pt);
    return d * d;
  }));
}

double convergence_rate(double e_coarse, double e_fine, double h_coarse,
                        double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

double pressure_robustness_diff(const FeSpace& V, const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (static_cast<int>(a.size()) != V.ndofs ||
      static_cast<int>(b.size()) != V.ndofs)
    throw MeshMismatchError(
        "coefficient vectors do not match the space dimension");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const auto zero_s = [](Vec2) { return 0.0; };
  const auto zero_v = [](Vec2) { return Vec2{0, 0}; };
  double norm_d, norm_a;
  if (V.ref.vector_valued) {
    norm_d = error_l2(V, d, zero_v);
    norm_a = error_l2(V, a, zero_v);
  } else {
    norm_d = error_l2(V, d, zero_s);
    norm_a = error_l2(V, a, zero_s);
  }
  return norm_d / std::max(norm_a, 1e-30);
}

std::vector<RateRow> ErrorReport::rates() const {
  std::vector<RateRow> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const ErrorRow& c = rows[i - 1];
    const ErrorRow& f = rows[i];
    RateRow r{nan, nan, nan};
    if (c.h > 0 && f.h > 0 && c.h != f.h) {
      const auto rate = [&](double ec, double ef) {
        return ec > 0 && ef > 0 ? convergence_rate(ec, ef, c.h, f.h) : nan;
      };
      r.u_l2 = rate(c.u_l2, f.u_l2);
      r.grad_u_l2 = rate(c.grad_u_l2, f.grad_u_l2);
      r.p_l2 = rate(c.p_l2, f.p_l2);
    }
    out.push_back(r);
  }
  return out;
}

void write_report_csv(const ErrorReport& report, const std::string& path) {
  const bool with_rates = report.rows.size() >= 2;
  const auto rr = report.rates();
  std::string out =
      "h,dofs,u_l2,grad_u_l2,p_l2,div_linf,div_l2,cond1,residual,alpha";
  if (with_rates) out += ",rate_u,rate_grad_u,rate_p";
  out += "\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ErrorRow& r = report.rows[i];
    fmt(out, "%.17g", r.h);
    out += "," + std::to_string(r.dofs);
    for (double v : {r.u_l2, r.grad_u_l2, r.p_l2, r.div_linf, r.div_l2, r.cond,
                     r.residual, r.alpha})
      fmt(out, ",%.17g", v);
    if (with_rates) {
      if (i == 0) {
        out += ",,,";
      } else {
        const RateRow& rt = rr[i - 1];
        for (double v : {rt.u_l2, rt.grad_u_l2, rt.p_l2}) {
          out += ",";
          if (std::isfinite(v)) fmt(out, "%.17g", v);
        }
      }
    }
    out += "\n";
  }
  open_or_throw(path) << out;
}

void write_report_json(const ErrorReport& report, const std::string& path) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["schema"] = "cut-stokes-report";
  doc["schema_version"] = 1;
  doc["title"] = report.title;
  doc["rows"] = json::array();
  for (const ErrorRow& r : report.rows) {
    json row;
    row["h"] = r.h;
    row["dofs"] = r.dofs;
    row["u_l2"] = r.u_l2;
    row["grad_u_l2"] = r.grad_u_l2;
    row["p_l2"] = r.p_l2;
    row["div_linf"] = r.div_linf;
    row["div_l2"] = r.div_l2;
    row["cond1"] = r.cond;
    row["residual"] = r.residual;
    row["alpha"] = r.alpha;
    doc["rows"].push_back(std::move(row));
  }
  doc["rates"] = json::array();
  for (const RateRow& rt : report.rates()) {
    json row;
    row["u_l2"] = std::isfinite(rt.u_l2) ? json(rt.u_l2) : json(nullptr);
    row["grad_u_l2"] =
        std::isfinite(rt.grad_u_l2) ? json(rt.grad_u_l2) : json(nullptr);
    row["p_l2"] = std::isfinite(rt.p_l2) ? json(rt.p_l2) : json(nullptr);
    doc["rates"].push_back(std::move(row));
  }
  open_or_throw(path) << doc.dump(2) << "\n";
}

namespace {

struct Series {
  const char* name;
  const char* color;
  std::vector<std::pair<double, double>> pts;  ///< (h, error), positives only
};

}  // namespace

void write_convergence_svg(const ErrorReport& report, const std::string& path) {
  Series series[3] = {{"u L2", "#1f77b4", {}},
                      {"grad u L2", "#2ca02c", {}},
                      {"p L2", "#d62728", {}}};
  for (const ErrorRow& r : report.rows) {
    if (r.h <= 0) continue;
    if (r.u_l2 > 0) series[0].pts.emplace_back(r.h, r.u_l2);
    if (r.grad_u_l2 > 0) series[1].pts.emplace_back(r.h, r.grad_u_l2);
    if (r.p_l2 > 0) series[2].pts.emplace_back(r.h, r.p_l2);
  }

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [h, e] : s.pts) {
      xmin = std::min(xmin, std::log10(h));
      xmax = std::max(xmax, std::log10(h));
      ymin = std::min(ymin, std::log10(e));
      ymax = std::max(ymax, std::log10(e));
    }
  if (xmin > xmax) xmin = -2, xmax = 0;              // empty report
  if (ymin > ymax) ymin = -8, ymax = 0;
  if (xmax - xmin < 0.5) xmax = xmin + 0.5;
  if (ymax - ymin < 0.5) ymax = ymin + 0.5;
  const double pad = 0.08;
  xmin -= pad * (xmax - xmin), xmax += pad * (xmax - xmin);
  ymin -= pad * (ymax - ymin), ymax += pad * (ymax - ymin);

  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  const auto X = [&](double lh) {
    return ml + (lh - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  const auto Y = [&](double le) {
    return H - mb - (le - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"12\">\n<rect width=\"100%%\" height=\"100%%\" "
                "fill=\"white\"/>\n",
                W, H);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"22\" font-size=\"14\">%s</text>\n", ml,
                report.title.empty() ? "convergence" : report.title.c_str());
  out += buf;

  // Decade grid.
  for (int d = static_cast<int>(std::ceil(xmin)); d <= std::floor(xmax); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#dddddd\"/>\n<text x=\"%.1f\" y=\"%.1f\" "
                  "text-anchor=\"middle\">1e%d</text>\n",
                  X(d), Y(ymin), X(d), Y(ymax), X(d), H - mb + 18, d);
    out += buf;
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= std::floor(ymax); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#dddddd\"/>\n<text x=\"%.1f\" y=\"%.1f\" "
                  "text-anchor=\"end\">1e%d</text>\n",
                  X(xmin), Y(d), X(xmax), Y(d), ml - 6, Y(d) + 4, d);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"#333333\"/>\n<text x=\"%.1f\" "
                "y=\"%.1f\" text-anchor=\"middle\">h</text>\n",
                X(xmin), Y(ymax), X(xmax) - X(xmin), Y(ymin) - Y(ymax),
                (X(xmin) + X(xmax)) / 2, H - 10.0);
  out += buf;

  // Reference slopes 1 and 2 anchored at the first u point.
  if (!series[0].pts.empty()) {
    const double lh0 = std::log10(series[0].pts.front().first);
    const double le0 = std::log10(series[0].pts.front().second);
    const double lh1 = std::log10(series[0].pts.back().first);
    for (int slope : {1, 2}) {
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                    "stroke=\"#aaaaaa\" stroke-dasharray=\"5,4\"/>\n"
                    "<text x=\"%.1f\" y=\"%.1f\" fill=\"#888888\">h^%d</text>\n",
                    X(lh0), Y(le0 + 0.3), X(lh1),
                    Y(le0 + 0.3 + slope * (lh1 - lh0)), X(lh1) + 4,
                    Y(le0 + 0.3 + slope * (lh1 - lh0)) + 4, slope);
      out += buf;
    }
  }

  int legend_y = static_cast<int>(mt) + 10;
  for (const auto& s : series) {
    if (s.pts.empty()) continue;
    std::string poly;
    for (const auto& [h, e] : s.pts) {
      fmt(poly, "%.1f", X(std::log10(h)));
      fmt(poly, ",%.1f ", Y(std::log10(e)));
    }
    std::snprintf(buf, sizeof buf,
                  "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                  "stroke-width=\"1.8\"/>\n",
                  poly.c_str(), s.color);
    out += buf;
    for (const auto& [h, e] : s.pts) {
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                    X(std::log10(h)), Y(std::log10(e)), s.color);
      out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" fill=\"%s\">%s</text>\n",
                  W - mr - 90, legend_y, s.color, s.name);
    out += buf;
    legend_y += 16;
  }
  out += "</svg>\n";
  open_or_throw(path) << out;
}

void write_divergence_heatmap_svg(const ActiveMesh& am,
                                  const std::vector<double>& element_max,
                                  const std::string& path) {
  const auto& bg = am.bg;
  const double w = bg.bbox[2] - bg.bbox[0], h = bg.bbox[3] - bg.bbox[1];
  const double margin = 0.03 * std::max(w, h);

  // Log color scale between the smallest positive and the largest value.
  double vmax = 0, vmin_pos = 1e300;
  for (int t : am.active_elems) {
    const double v = element_max[t];
    vmax = std::max(vmax, v);
    if (v > 0) vmin_pos = std::min(vmin_pos, v);
  }
  const double lmax = vmax > 0 ? std::log10(vmax) : 0.0;
  const double lmin = vmax > 0 ? std::log10(std::max(vmin_pos, vmax * 1e-12))
                               : -1.0;

  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" "
                "viewBox=\"%.6f %.6f %.6f %.6f\">\n"
                "<g transform=\"translate(0,%.6f) scale(1,-1)\">\n",
                bg.bbox[0] - margin, bg.bbox[1] - margin, w + 2 * margin,
                h + 2 * margin, bg.bbox[1] + bg.bbox[3]);
  out += buf;

  const double stroke_w = 0.003 * std::max(w, h);
  for (std::size_t t = 0; t < bg.triangles.size(); ++t) {
    const auto co = bg.tri_coords(static_cast<int>(t));
    std::string fill = "#f2f2f2";  // off the active mesh
    if (am.is_active[t]) {
      const double v = element_max[t];
      if (v <= 0 || vmax <= 0) {
        fill = "#e8eef4";
      } else {
        const double s = std::clamp(
            (std::log10(v) - lmin) / std::max(lmax - lmin, 1e-300), 0.0, 1.0);
        std::snprintf(buf, sizeof buf, "hsl(%.0f,85%%,55%%)",
                      240.0 * (1.0 - s));
        fill = buf;
      }
    }
    std::snprintf(buf, sizeof buf,
                  "<polygon points=\"%.6f,%.6f %.6f,%.6f %.6f,%.6f\" "
                  "fill=\"%s\" stroke=\"#999999\" stroke-width=\"%.6f\"/>\n",
                  co[0].x, co[0].y, co[1].x, co[1].y, co[2].x, co[2].y,
                  fill.c_str(), stroke_w);
    out += buf;
  }
  out += "</g>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.6f\" y=\"%.6f\" font-family=\"sans-serif\" "
                "font-size=\"%.6f\">max |div u| = %.3e (red), floor %.3e "
                "(blue)</text>\n",
                bg.bbox[0] - margin / 2, bg.bbox[1] - margin / 3,
                0.035 * std::max(w, h), format_guard(vmax),
                format_guard(vmax > 0 ? std::pow(10.0, lmin) : 0.0));
  out += buf;
  out += "</svg>\n";
  open_or_throw(path) << out;
}

std::vector<std::string> emit_report(const ErrorReport& report,
                                     const std::string& dir,
                                     const ReportFormats& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory: " + dir);
  std::vector<std::string> written;
  const auto join = [&](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };
  if (formats.csv) {
    written.push_back(join("report.csv"));
    write_report_csv(report, written.back());
  }
  if (formats.json) {
    written.push_back(join("report.json"));
    write_report_json(report, written.back());
  }
  if (formats.svg) {
    written.push_back(join("convergence.svg"));
    write_convergence_svg(report, written.back());
  }
  return written;
}

}  // namespace cutstokes
