#include "nehari/contours.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <variant>

namespace nehari {
namespace {

// Crossing points are keyed by the lattice edge they sit on: the lower-left
// node of the edge plus its direction.
struct EdgeKey {
  int i, j;
  bool vertical;
  bool operator<(const EdgeKey& o) const {
    if (j != o.j) return j < o.j;
    if (i != o.i) return i < o.i;
    return vertical < o.vertical;
  }
  bool operator==(const EdgeKey& o) const { return i == o.i && j == o.j && vertical == o.vertical; }
};

struct Segment {
  EdgeKey a, b;
};

std::vector<Polyline> contour_level(const Field& u, double level) {
  const Grid& g = u.grid();
  const double h = g.spacing();
  std::map<EdgeKey, std::pair<double, double>> points;
  std::vector<Segment> segs;

  auto point_on = [&](const EdgeKey& e) {
    auto it = points.find(e);
    if (it != points.end()) return;
    const auto k0 = static_cast<std::size_t>(g.index(e.i, e.j));
    const auto k1 = static_cast<std::size_t>(e.vertical ? g.index(e.i, e.j + 1) : g.index(e.i + 1, e.j));
    const double v0 = u[k0], v1 = u[k1];
    const double t = (level - v0) / (v1 - v0);
    const double x = g.box_x0() + (e.i + (e.vertical ? 0.0 : t)) * h;
    const double y = g.box_y0() + (e.j + (e.vertical ? t : 0.0)) * h;
    points.emplace(e, std::make_pair(x, y));
  };

  for (int j = 0; j + 1 < g.box_height(); ++j) {
    for (int i = 0; i + 1 < g.box_width(); ++i) {
      const std::int32_t n00 = g.index(i, j), n10 = g.index(i + 1, j);
      const std::int32_t n11 = g.index(i + 1, j + 1), n01 = g.index(i, j + 1);
      if (n00 < 0 || n10 < 0 || n11 < 0 || n01 < 0) continue;
      const double v[4] = {u[static_cast<std::size_t>(n00)], u[static_cast<std::size_t>(n10)],
                           u[static_cast<std::size_t>(n11)], u[static_cast<std::size_t>(n01)]};
      int mask = 0;
      for (int c = 0; c < 4; ++c)
        if (v[c] > level) mask |= 1 << c;
      if (mask == 0 || mask == 15) continue;
      // Cell edges: 0 bottom, 1 right, 2 top, 3 left.
      const EdgeKey edge[4] = {{i, j, false}, {i + 1, j, true}, {i, j + 1, false}, {i, j, true}};
      auto add = [&](int ea, int eb) {
        point_on(edge[ea]);
        point_on(edge[eb]);
        segs.push_back({edge[ea], edge[eb]});
      };
      const bool centre_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) > level;
      switch (mask) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(3, 2); break;
        case 5:  // corners 0 and 2 above
          if (centre_above) { add(3, 2); add(0, 1); } else { add(3, 0); add(1, 2); }
          break;
        case 10:  // corners 1 and 3 above
          if (centre_above) { add(3, 0); add(1, 2); } else { add(3, 2); add(0, 1); }
          break;
        default: break;
      }
    }
  }

  // Chain segments through shared crossing points.
  std::map<EdgeKey, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    incident[segs[s].a].push_back(s);
    incident[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::size_t first, const EdgeKey& start) {
    Polyline pl;
    pl.level = level;
    pl.points.push_back(points.at(start));
    EdgeKey at = start;
    std::size_t s = first;
    for (;;) {
      used[s] = true;
      const EdgeKey next = segs[s].a == at ? segs[s].b : segs[s].a;
      pl.points.push_back(points.at(next));
      at = next;
      std::size_t cont = segs.size();
      for (std::size_t c : incident[at])
        if (!used[c]) {
          cont = c;
          break;
        }
      if (cont == segs.size()) break;
      s = cont;
    }
    pl.closed = at == start && pl.points.size() > 2;
    out.push_back(std::move(pl));
  };
  // Open curves first, starting from their ends, then closed loops.
  for (const auto& [key, list] : incident)
    if (list.size() == 1 && !used[list[0]]) walk(list[0], key);
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) walk(s, segs[s].a);
  return out;
}

}  // namespace

std::vector<Polyline> extract_contours(const Field& u, const std::vector<double>& levels) {
  std::vector<Polyline> out;
  for (double level : levels) {
    auto lines = contour_level(u, level);
    out.insert(out.end(), std::make_move_iterator(lines.begin()), std::make_move_iterator(lines.end()));
  }
  return out;
}

void write_contours_csv(std::ostream& os, const std::vector<Polyline>& lines) {
  os << "level,polyline,x,y\n";
  char buf[128];
  for (std::size_t p = 0; p < lines.size(); ++p) {
    for (const auto& [x, y] : lines[p].points) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", lines[p].level, p, x, y);
      os << buf;
    }
  }
}

std::string contours_svg(const Grid& grid, const std::vector<Polyline>& lines,
                         const std::string& title) {
  double x0, x1, y0, y1;
  if (const auto* r = std::get_if<Rectangle>(&grid.domain())) {
    x0 = r->x0; x1 = r->x1; y0 = r->y0; y1 = r->y1;
  } else {
    const auto& d = std::get<Disk>(grid.domain());
    x0 = d.cx - d.radius; x1 = d.cx + d.radius; y0 = d.cy - d.radius; y1 = d.cy + d.radius;
  }
  const double scale = 400.0 / std::max(x1 - x0, y1 - y0);
  const double margin = 20.0;
  const double width = (x1 - x0) * scale + 2 * margin;
  const double height = (y1 - y0) * scale + 2 * margin;
  auto px = [&](double x) { return margin + (x - x0) * scale; };
  auto py = [&](double y) { return margin + (y1 - y) * scale; };

  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" height=\"%.1f\" "
                "viewBox=\"0 0 %.1f %.1f\">\n",
                width, height, width, height);
  s += buf;
  if (!title.empty()) s += "<title>" + title + "</title>\n";
  if (grid.is_disk()) {
    const auto& d = std::get<Disk>(grid.domain());
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"none\" stroke=\"#888\"/>\n",
                  px(d.cx), py(d.cy), d.radius * scale);
  } else {
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" "
                  "stroke=\"#888\"/>\n",
                  px(x0), py(y1), (x1 - x0) * scale, (y1 - y0) * scale);
  }
  s += buf;
  for (const auto& pl : lines) {
    if (pl.points.empty()) continue;
    const char* colour = pl.level > 0 ? "#c0392b" : (pl.level < 0 ? "#2c5aa0" : "#000");
    std::snprintf(buf, sizeof buf, "<path data-level=\"%g\" fill=\"none\" stroke=\"%s\" d=\"", pl.level,
                  colour);
    s += buf;
    for (std::size_t k = 0; k < pl.points.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.3f %.3f", k == 0 ? "M" : " L", px(pl.points[k].first),
                    py(pl.points[k].second));
      s += buf;
    }
    if (pl.closed) s += " Z";
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace nehari
