#include "hylyap/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "hylyap/errors.hpp"

namespace hylyap {

namespace {

struct Segment {
  std::size_t a;  ///< edge id of the first endpoint
  std::size_t b;
};

std::string fixed3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  // Avoid "-0.000" so equal geometry prints identically.
  if (std::string(buf) == "-0.000") return "0.000";
  return buf;
}

}  // namespace

std::vector<Polyline> marching_squares(const std::function<double(double, double)>& f, double level,
                                       const BBox& box, std::size_t res) {
  if (res == 0 || !(box.x1 > box.x0) || !(box.y1 > box.y0)) {
    throw UsageError("marching_squares: need res > 0 and a nonempty box");
  }
  const std::size_t m = res + 1;
  const double hx = (box.x1 - box.x0) / static_cast<double>(res);
  const double hy = (box.y1 - box.y0) / static_cast<double>(res);
  auto xcoord = [&](std::size_t i) { return box.x0 + hx * static_cast<double>(i); };
  auto ycoord = [&](std::size_t j) { return box.y0 + hy * static_cast<double>(j); };

  std::vector<double> g(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) g[j * m + i] = f(xcoord(i), ycoord(j)) - level;
  }
  auto val = [&](std::size_t i, std::size_t j) { return g[j * m + i]; };
  auto h_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * m + i); };
  auto v_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * m + i) + 1; };

  std::unordered_map<std::size_t, std::array<double, 2>> edge_point;
  auto crossing = [&](std::size_t id) {
    auto it = edge_point.find(id);
    if (it != edge_point.end()) return it->second;
    const std::size_t node = id / 2;
    const std::size_t i = node % m;
    const std::size_t j = node / m;
    const bool horizontal = id % 2 == 0;
    const std::size_t i2 = horizontal ? i + 1 : i;
    const std::size_t j2 = horizontal ? j : j + 1;
    const double ga = val(i, j);
    const double gb = val(i2, j2);
    const double s = ga == gb ? 0.5 : ga / (ga - gb);
    const std::array<double, 2> p{xcoord(i) + s * (xcoord(i2) - xcoord(i)), ycoord(j) + s * (ycoord(j2) - ycoord(j))};
    edge_point.emplace(id, p);
    return p;
  };

  std::vector<Segment> segs;
  for (std::size_t j = 0; j < res; ++j) {
    for (std::size_t i = 0; i < res; ++i) {
      const double c[4] = {val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      if (!std::all_of(c, c + 4, [](double v) { return std::isfinite(v); })) continue;
      const bool in[4] = {c[0] > 0.0, c[1] > 0.0, c[2] > 0.0, c[3] > 0.0};
      // Edges: 0 bottom, 1 right, 2 top, 3 left; edge e joins corners e and e+1.
      const std::size_t ids[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      std::vector<int> cut;
      for (int e = 0; e < 4; ++e) {
        if (in[e] != in[(e + 1) % 4]) cut.push_back(e);
      }
      if (cut.size() == 2) {
        segs.push_back({ids[cut[0]], ids[cut[1]]});
      } else if (cut.size() == 4) {
        const bool center_in = (c[0] + c[1] + c[2] + c[3]) / 4.0 > 0.0;
        // Isolate the corners whose state differs from the center: corner k
        // is bounded by edges k-1 and k.
        for (int k = 0; k < 4; ++k) {
          if (in[k] != center_in) segs.push_back({ids[(k + 3) % 4], ids[k]});
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::vector<std::size_t>> at_edge;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    at_edge[segs[s].a].push_back(s);
    at_edge[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  auto next_from = [&](std::size_t edge, std::size_t from_seg) -> std::ptrdiff_t {
    for (std::size_t s : at_edge[edge]) {
      if (s != from_seg && !used[s]) return static_cast<std::ptrdiff_t>(s);
    }
    return -1;
  };
  auto walk = [&](std::size_t start_seg, std::size_t edge) {
    std::vector<std::size_t> edges;
    std::size_t cur = start_seg;
    while (true) {
      const std::ptrdiff_t nx = next_from(edge, cur);
      if (nx < 0) break;
      cur = static_cast<std::size_t>(nx);
      used[cur] = true;
      edge = segs[cur].a == edge ? segs[cur].b : segs[cur].a;
      edges.push_back(edge);
    }
    return edges;
  };

  std::vector<Polyline> out;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<std::size_t> forward = walk(s, segs[s].b);
    const bool closed = !forward.empty() && forward.back() == segs[s].a;
    std::vector<std::size_t> chain;
    if (closed) {
      chain.push_back(segs[s].a);
      chain.push_back(segs[s].b);
      chain.insert(chain.end(), forward.begin(), forward.end() - 1);
    } else {
      std::vector<std::size_t> backward = walk(s, segs[s].a);
      chain.assign(backward.rbegin(), backward.rend());
      chain.push_back(segs[s].a);
      chain.push_back(segs[s].b);
      chain.insert(chain.end(), forward.begin(), forward.end());
    }
    Polyline pl;
    pl.closed = closed;
    for (std::size_t e : chain) pl.points.push_back(crossing(e));
    out.push_back(std::move(pl));
  }
  return out;
}

std::function<double(double, double)> grid_function(const ProperPiecewiseFn& v) {
  if (v.dim() != 2) throw UsageError("level sets need a planar function");
  return [v](double x, double y) {
    try {
      return v(Vec{x, y});
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

std::string render_svg(const std::vector<ContourSet>& contours, const BBox& box,
                       const std::vector<Overlay>& overlays, int size_px) {
  static const char* kColors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const double w = box.x1 - box.x0;
  const double h = box.y1 - box.y0;
  const double scale = static_cast<double>(size_px) / std::max(w, h);
  const double width = w * scale;
  const double height = h * scale;
  auto px = [&](double x) { return fixed3((x - box.x0) * scale); };
  auto py = [&](double y) { return fixed3((box.y1 - y) * scale); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed3(width) << "\" height=\""
     << fixed3(height) << "\" viewBox=\"0 0 " << fixed3(width) << ' ' << fixed3(height) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fixed3(width) << "\" height=\"" << fixed3(height)
     << "\" fill=\"white\"/>\n";
  // Axes through the origin when visible.
  if (box.x0 < 0.0 && box.x1 > 0.0) {
    os << "<line x1=\"" << px(0.0) << "\" y1=\"0.000\" x2=\"" << px(0.0) << "\" y2=\"" << fixed3(height)
       << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  if (box.y0 < 0.0 && box.y1 > 0.0) {
    os << "<line x1=\"0.000\" y1=\"" << py(0.0) << "\" x2=\"" << fixed3(width) << "\" y2=\"" << py(0.0)
       << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (std::size_t k = 0; k < contours.size(); ++k) {
    os << "<g class=\"level\" data-level=\"" << contours[k].level << "\" stroke=\"" << kColors[k % 6]
       << "\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (const auto& line : contours[k].lines) {
      os << (line.closed ? "<polygon" : "<polyline") << " points=\"";
      for (std::size_t i = 0; i < line.points.size(); ++i) {
        os << (i ? " " : "") << px(line.points[i][0]) << ',' << py(line.points[i][1]);
      }
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  for (const auto& ov : overlays) {
    if (ov.points.empty()) continue;
    os << "<polyline class=\"trajectory\" stroke=\"#d62728\" fill=\"none\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ov.points.size(); ++i) {
      os << (i ? " " : "") << px(ov.points[i][0]) << ',' << py(ov.points[i][1]);
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

ConvexityReport midpoint_convexity(const ProperPiecewiseFn& v, double level, std::size_t directions,
                                   double r_max, double tol) {
  if (v.dim() != 2) throw UsageError("midpoint_convexity: planar functions only");
  if (directions < 3) throw UsageError("midpoint_convexity: need at least three directions");
  const Vec origin(2);
  if (!(v(origin) < level)) throw DomainError("level set does not enclose the origin", origin.values());

  std::vector<Vec> boundary;
  boundary.reserve(directions);
  for (std::size_t k = 0; k < directions; ++k) {
    const Vec u = unit_direction(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(directions));
    double r = 0.0;
    if (v.homogeneous()) {
      const double vu = v(u);
      if (!(vu > 0.0)) throw DomainError("function is not positive along a ray", u.values());
      r = std::sqrt(level / vu);
      if (!(r <= r_max)) throw DomainError("level not reached within r_max", u.values());
    } else {
      if (!(v(r_max * u) >= level)) throw DomainError("level not reached within r_max", u.values());
      double lo = 0.0;
      double hi = r_max;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * r_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        (v(mid * u) < level ? lo : hi) = mid;
      }
      r = 0.5 * (lo + hi);
    }
    boundary.push_back(r * u);
  }

  ConvexityReport rep;
  rep.worst_value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < boundary.size(); ++a) {
    for (std::size_t b = a + 1; b < boundary.size(); ++b) {
      const Vec mid = 0.5 * (boundary[a] + boundary[b]);
      const double val = v(mid);
      ++rep.chords;
      if (val > rep.worst_value) {
        rep.worst_value = val;
        rep.worst_a = boundary[a];
        rep.worst_b = boundary[b];
      }
    }
  }
  rep.convex = rep.worst_value <= level * (1.0 + tol);
  return rep;
}

}  // namespace hylyap
