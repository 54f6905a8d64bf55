#include "cloaksim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <unordered_map>

#include "cloaksim/csv.hpp"
#include "cloaksim/grid.hpp"

namespace cloaksim {

Mat2 EigenSample::reconstruct() const {
  Mat2 P;
  P.row(0) = e1.transpose();
  P.row(1) = e2.transpose();
  return P.transpose() * Eigen::Vector2d(lambda1, lambda2).asDiagonal() * P;
}

EigenSample eigendecompose(const Mat2& C, const Vec2& reference) {
  const double a = C(0, 0);
  const double d = C(1, 1);
  const double b = 0.5 * (C(0, 1) + C(1, 0));
  const double mean = 0.5 * (a + d);
  const double disc = std::hypot(0.5 * (a - d), b);
  EigenSample out;
  out.lambda1 = mean + disc;
  out.lambda2 = mean - disc;
  if (!(out.lambda2 > 0.0)) throw DomainError("eigendecompose: tensor is not positive definite");
  const Vec2 ref = reference.normalized();
  if (disc <= 1e-15 * std::abs(mean)) {
    out.e1 = ref;
  } else {
    // Two algebraically equivalent eigenvectors; keep the better conditioned one.
    const Vec2 u(b, out.lambda1 - a);
    const Vec2 v(out.lambda1 - d, b);
    out.e1 = (u.squaredNorm() >= v.squaredNorm() ? u : v).normalized();
    if (out.e1.dot(ref) < 0.0) out.e1 = -out.e1;
  }
  out.e2 = Vec2(out.e1[1], -out.e1[0]);
  return out;
}

Vec2 face_parallel(int side) { return (side == 1 || side == 3) ? Vec2(0, 1) : Vec2(1, 0); }

EigenSample principal_axes(const CloakSpec& spec, const Vec2& x) {
  const RegionTag tag = classify(spec, x);
  const int side = tag.kind == RegionKind::trapezoid ? tag.side : side_of(x);
  EigenSample e = eigendecompose(material(spec, x).C, face_parallel(side));
  e.position = x;
  return e;
}

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::refined: return "refined";
    case LatticeKind::basic: return "basic";
    case LatticeKind::uniform: return "uniform";
  }
  return "refined";
}

std::string_view to_string(Neighbour n) {
  switch (n) {
    case Neighbour::lattice: return "lattice";
    case Neighbour::continuum: return "continuum";
    case Neighbour::inclusion: return "inclusion";
    case Neighbour::free: return "free";
  }
  return "free";
}

double LatticeGraph::total_mass() const {
  double m = 0.0;
  for (const LatticeNode& n : nodes) m += n.mass;
  return m;
}

namespace {

double inf_norm(const Vec2& x) { return std::max(std::abs(x[0]), std::abs(x[1])); }

struct FrameIndex {
  long na = 0;  // a / ell
  long nb = 0;  // (a + w) / ell
};

FrameIndex frame_index(const CloakSpec& spec, double ell) {
  spec.validate();
  if (!(ell > 0.0)) throw GeometryError("lattice: link length must be positive");
  const double ra = spec.a / ell;
  const double rw = spec.w / ell;
  const long na = std::lround(ra);
  const long nw = std::lround(rw);
  if (std::abs(ra - na) > 1e-9 * std::max(1.0, ra) || std::abs(rw - nw) > 1e-9 * std::max(1.0, rw) || nw < 1)
    throw GeometryError("lattice: link length must divide both a and w");
  return {na, na + nw};
}

// Four-point Gauss-Legendre rule on [-1, 1].
constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625462, 0.6521451548625462, 0.3478548451374538};

using DensityFn = std::function<double(const Vec2&)>;
using StiffnessFn = std::function<double(const Vec2& mid, int side, bool parallel)>;

LatticeGraph build_regular(const CloakSpec& spec, double ell, LatticeKind kind, const DensityFn& density,
                           const StiffnessFn& stiffness) {
  const FrameIndex fi = frame_index(spec, ell);
  LatticeGraph g;
  g.kind = kind;
  g.spec = spec;
  g.ell = ell;

  const long span = fi.nb;
  const long width = 2 * span + 1;
  std::vector<int> id(static_cast<std::size_t>(width * width), -1);
  auto slot = [&](long p1, long p2) { return static_cast<std::size_t>((p2 + span) * width + (p1 + span)); };
  auto node_at = [&](long p1, long p2) -> int {
    if (std::abs(p1) > span || std::abs(p2) > span) return -1;
    return id[slot(p1, p2)];
  };
  const double lo = spec.a;
  const double hi = spec.outer();
  auto cell_in_frame = [&](const Vec2& c) {
    const double r = inf_norm(c);
    return r > lo && r < hi;
  };

  for (long p2 = -span; p2 <= span; ++p2) {
    for (long p1 = -span; p1 <= span; ++p1) {
      const long r = std::max(std::abs(p1), std::abs(p2));
      if (r < fi.na) continue;
      LatticeNode n;
      n.p1 = p1;
      n.p2 = p2;
      n.x = Vec2(ell * static_cast<double>(p1), ell * static_cast<double>(p2));
      // Integrate density over the quarters of the unit cell inside the frame.
      const double qh = 0.25 * ell;
      for (int sx = -1; sx <= 1; sx += 2) {
        for (int sy = -1; sy <= 1; sy += 2) {
          const Vec2 qc = n.x + Vec2(sx * qh, sy * qh);
          if (!cell_in_frame(qc)) continue;
          n.area += 4.0 * qh * qh;
          double m = 0.0;
          for (int u = 0; u < 4; ++u)
            for (int v = 0; v < 4; ++v)
              m += kGaussW[u] * kGaussW[v] * density(qc + qh * Vec2(kGaussX[u], kGaussX[v]));
          n.mass += m * qh * qh;
        }
      }
      id[slot(p1, p2)] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(n);
    }
  }

  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const LatticeNode& n = g.nodes[k];
    for (int dir = 0; dir < 2; ++dir) {
      const long q1 = n.p1 + (dir == 0 ? 1 : 0);
      const long q2 = n.p2 + (dir == 1 ? 1 : 0);
      const int other = node_at(q1, q2);
      if (other < 0) continue;
      const Vec2 mid = 0.5 * (n.x + g.nodes[static_cast<std::size_t>(other)].x);
      const double half = 0.5 * ell;
      const Vec2 off = dir == 0 ? Vec2(0, half) : Vec2(half, 0);
      const int cells = (cell_in_frame(mid + off) ? 1 : 0) + (cell_in_frame(mid - off) ? 1 : 0);
      if (cells == 0) continue;
      LatticeLink l;
      l.a = static_cast<int>(k);
      l.b = other;
      l.length = ell;
      l.share = 0.5 * cells;
      const int side = side_of(mid);
      const bool vertical = dir == 1;
      l.parallel = (side == 1 || side == 3) ? vertical : !vertical;
      l.stiffness = stiffness(mid, side, l.parallel);
      g.links.push_back(l);
    }
  }
  return g;
}

}  // namespace

LatticeGraph build_refined(const CloakSpec& spec, double ell) {
  auto density = [&](const Vec2& x) { return material(spec, x).rho; };
  auto stiffness = [&](const Vec2& mid, int side, bool parallel) {
    const EigenSample e = eigendecompose(material_side(spec, mid, side).C, face_parallel(side));
    return ell * (parallel ? e.lambda1 : e.lambda2);
  };
  return build_regular(spec, ell, LatticeKind::refined, density, stiffness);
}

LatticeGraph build_basic(const CloakSpec& spec, double ell) {
  spec.validate();
  const EigenSample e = eigendecompose(material_side(spec, Vec2(spec.outer(), 0.0), 1).C, face_parallel(1));
  const double rho = spec.rho * (1.0 + spec.a / spec.w);
  auto density = [&](const Vec2&) { return rho; };
  auto stiffness = [&](const Vec2&, int, bool parallel) { return ell * (parallel ? e.lambda1 : e.lambda2); };
  return build_regular(spec, ell, LatticeKind::basic, density, stiffness);
}

LatticeGraph build_uniform(const CloakSpec& spec, double ell) {
  auto density = [&](const Vec2&) { return spec.rho; };
  auto stiffness = [&](const Vec2&, int, bool) { return ell * spec.mu; };
  return build_regular(spec, ell, LatticeKind::uniform, density, stiffness);
}

LatticeEmbedding couple(const LatticeGraph& lattice, const Grid& grid) {
  const double h = grid.h();
  if (std::abs(lattice.ell - h) > 1e-12 * h) throw GeometryError("couple: lattice link length must equal the grid spacing");
  LatticeEmbedding emb;
  emb.grid_index.reserve(lattice.nodes.size());
  std::unordered_map<long long, int> by_pos;
  auto key = [](long p1, long p2) { return (static_cast<long long>(p1) << 32) ^ static_cast<long long>(p2 & 0xffffffff); };
  for (std::size_t k = 0; k < lattice.nodes.size(); ++k) {
    const LatticeNode& n = lattice.nodes[k];
    const long i = std::lround(n.x[0] / h) - grid.origin_index1();
    const long j = std::lround(n.x[1] / h) - grid.origin_index2();
    if (i < 1 || j < 1 || i >= grid.n1() - 1 || j >= grid.n2() - 1)
      throw GeometryError("couple: lattice node outside the grid interior");
    const int ii = static_cast<int>(i);
    const int jj = static_cast<int>(j);
    if ((grid.node(ii, jj) - n.x).norm() > 1e-9 * h) throw GeometryError("couple: lattice node is not a grid node");
    emb.grid_index.push_back(grid.index(ii, jj));
    by_pos[key(n.p1, n.p2)] = static_cast<int>(k);
  }

  std::unordered_map<long long, bool> linked;
  for (const LatticeLink& l : lattice.links) {
    const LatticeNode& a = lattice.nodes[static_cast<std::size_t>(l.a)];
    const LatticeNode& b = lattice.nodes[static_cast<std::size_t>(l.b)];
    linked[key(a.p1 + b.p1, a.p2 + b.p2)] = true;  // midpoint * 2 identifies a link
  }

  const CloakSpec& s = lattice.spec;
  const long na = std::lround(s.a / lattice.ell);
  const long nb = std::lround(s.outer() / lattice.ell);
  static constexpr int dx[4] = {1, 0, -1, 0};
  static constexpr int dy[4] = {0, 1, 0, -1};
  for (std::size_t k = 0; k < lattice.nodes.size(); ++k) {
    const LatticeNode& n = lattice.nodes[k];
    const long r = std::max(std::abs(n.p1), std::abs(n.p2));
    if (r != na && r != nb) continue;
    BoundaryStencil bs;
    bs.node = static_cast<int>(k);
    bs.grid_index = emb.grid_index[k];
    for (int d = 0; d < 4; ++d) {
      const long q1 = n.p1 + dx[d];
      const long q2 = n.p2 + dy[d];
      const long rq = std::max(std::abs(q1), std::abs(q2));
      if (by_pos.count(key(q1, q2)) && linked.count(key(n.p1 + q1, n.p2 + q2))) bs.dirs[static_cast<std::size_t>(d)] = Neighbour::lattice;
      else if (rq > nb) bs.dirs[static_cast<std::size_t>(d)] = Neighbour::continuum;
      else if (rq < na && s.inner_bc == InnerBoundary::transmission) bs.dirs[static_cast<std::size_t>(d)] = Neighbour::inclusion;
      else bs.dirs[static_cast<std::size_t>(d)] = Neighbour::free;
    }
    emb.stencils.push_back(bs);
  }
  return emb;
}

namespace {

// Clip a step from x0 to x1 at the boundary of trapezoid `side`.
Vec2 clip_to_side(const CloakSpec& spec, const Vec2& x0, const Vec2& x1, int side) {
  const RegionTag tag{RegionKind::trapezoid, side};
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (classify(spec, x0 + mid * (x1 - x0)) == tag) lo = mid;
    else hi = mid;
  }
  return x0 + lo * (x1 - x0);
}

std::vector<Vec2> trace_family(const CloakSpec& spec, const Vec2& seed, int side, int family, double sign, double dtau,
                               int steps) {
  const RegionTag tag{RegionKind::trapezoid, side};
  auto field = [&](const Vec2& x, const Vec2& prev) {
    const EigenSample e = eigendecompose(material_side(spec, x, side).C, face_parallel(side));
    Vec2 v = family == 1 ? e.e1 : e.e2;
    if (v.dot(prev) < 0.0) v = -v;
    return v;
  };
  std::vector<Vec2> pts{seed};
  Vec2 x = seed;
  const Vec2 fp = face_parallel(side);
  Vec2 dir = sign * field(seed, family == 1 ? fp : Vec2(fp[1], -fp[0]));
  for (int k = 0; k < steps; ++k) {
    const Vec2 k1 = field(x, dir);
    // A stage outside the trapezoid would sample the map where it is not
    // defined; the curve then ends on the boundary along k1.
    auto inside = [&](const Vec2& p) { return classify(spec, p) == tag; };
    Vec2 next = x + dtau * k1;
    bool stages_inside = inside(x + 0.5 * dtau * k1);
    if (stages_inside) {
      const Vec2 k2 = field(x + 0.5 * dtau * k1, k1);
      stages_inside = inside(x + 0.5 * dtau * k2);
      if (stages_inside) {
        const Vec2 k3 = field(x + 0.5 * dtau * k2, k2);
        stages_inside = inside(x + dtau * k3);
        if (stages_inside) {
          const Vec2 k4 = field(x + dtau * k3, k3);
          next = x + dtau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
      }
    }
    if (!stages_inside || !inside(next)) {
      const Vec2 edge = clip_to_side(spec, x, stages_inside ? next : Vec2(x + dtau * k1), side);
      if ((edge - x).norm() > 1e-14) pts.push_back(edge);
      break;
    }
    dir = (next - x).normalized();
    x = next;
    pts.push_back(x);
  }
  return pts;
}

bool segment_intersection(const Vec2& p, const Vec2& p2, const Vec2& q, const Vec2& q2, Vec2& out) {
  const Vec2 r = p2 - p;
  const Vec2 s = q2 - q;
  const double den = r[0] * s[1] - r[1] * s[0];
  if (std::abs(den) < 1e-300) return false;
  const Vec2 qp = q - p;
  const double t = (qp[0] * s[1] - qp[1] * s[0]) / den;
  const double u = (qp[0] * r[1] - qp[1] * r[0]) / den;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  out = p + t * r;
  return true;
}

}  // namespace

PrincipalLattice principal_lattice(const CloakSpec& spec, const std::vector<Vec2>& seeds, double dtau, int steps) {
  spec.validate();
  if (!(dtau > 0.0) || steps < 1) throw DomainError("principal_lattice: dtau and steps must be positive");
  PrincipalLattice out;
  for (const Vec2& seed : seeds) {
    const RegionTag tag = classify(spec, seed);
    if (tag.kind != RegionKind::trapezoid) continue;
    for (int family = 1; family <= 2; ++family) {
      std::vector<Vec2> back = trace_family(spec, seed, tag.side, family, -1.0, dtau, steps);
      const std::vector<Vec2> fwd = trace_family(spec, seed, tag.side, family, 1.0, dtau, steps);
      std::reverse(back.begin(), back.end());
      back.insert(back.end(), fwd.begin() + 1, fwd.end());
      if (back.size() < 2) continue;
      out.curves.push_back({tag.side, family, std::move(back)});
    }
  }

  for (std::size_t a = 0; a < out.curves.size(); ++a) {
    const PrincipalCurve& ca = out.curves[a];
    if (ca.family != 1) continue;
    for (std::size_t b = 0; b < out.curves.size(); ++b) {
      const PrincipalCurve& cb = out.curves[b];
      if (cb.family != 2 || cb.side != ca.side) continue;
      for (std::size_t i = 0; i + 1 < ca.points.size(); ++i) {
        for (std::size_t j = 0; j + 1 < cb.points.size(); ++j) {
          Vec2 x;
          if (!segment_intersection(ca.points[i], ca.points[i + 1], cb.points[j], cb.points[j + 1], x)) continue;
          PrincipalNode n;
          n.x = x;
          n.curve_a = static_cast<int>(a);
          n.curve_b = static_cast<int>(b);
          const EigenSample e = eigendecompose(material_side(spec, x, ca.side).C, face_parallel(ca.side));
          n.cos_field = std::abs(e.e1.dot(e.e2));
          const Vec2 ta = (ca.points[i + 1] - ca.points[i]).normalized();
          const Vec2 tb = (cb.points[j + 1] - cb.points[j]).normalized();
          n.cos_chord = std::abs(ta.dot(tb));
          out.nodes.push_back(n);
        }
      }
    }
  }
  return out;
}

std::vector<Vec2> default_principal_seeds(const CloakSpec& spec, int per_face) {
  std::vector<Vec2> seeds;
  const double b = spec.outer();
  for (int side = 1; side <= 4; ++side) {
    const double ang = 0.5 * kPi * (side - 1);
    Mat2 R;
    R << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    for (int k = 0; k < per_face; ++k) {
      const double t = -b + (k + 0.5) * 2.0 * b / per_face;
      seeds.push_back(R * Vec2(b * (1.0 - 1e-12), t));
      seeds.push_back(R * Vec2(spec.a + (k + 0.5) * spec.w / per_face, 0.0));
    }
  }
  return seeds;
}

void write_lattice_nodes_csv(std::ostream& out, const LatticeGraph& g) {
  out << "node_id,x1,x2,mass\n";
  for (std::size_t k = 0; k < g.nodes.size(); ++k)
    csv::write_row(out, {std::to_string(k), csv::num(g.nodes[k].x[0]), csv::num(g.nodes[k].x[1]), csv::num(g.nodes[k].mass)});
}

void write_lattice_links_csv(std::ostream& out, const LatticeGraph& g) {
  out << "node_a,node_b,stiffness,share\n";
  for (const LatticeLink& l : g.links)
    csv::write_row(out, {std::to_string(l.a), std::to_string(l.b), csv::num(l.stiffness), csv::num(l.share)});
}

void write_principal_csv(std::ostream& out, const PrincipalLattice& p) {
  out << "curve,side,family,x1,x2\n";
  for (std::size_t c = 0; c < p.curves.size(); ++c)
    for (const Vec2& x : p.curves[c].points)
      csv::write_row(out, {std::to_string(c), std::to_string(p.curves[c].side), std::to_string(p.curves[c].family),
                           csv::num(x[0]), csv::num(x[1])});
}

}  // namespace cloaksim
