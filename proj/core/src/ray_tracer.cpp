#include "cloaksim/ray_tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cloaksim/csv.hpp"

namespace cloaksim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vec2& x) { return std::max(std::abs(x[0]), std::abs(x[1])); }

// Parameter interval in which X0 + t N lies in the square |X|_inf <= r.
bool square_interval(const Vec2& X0, const Vec2& N, double r, double& t0, double& t1) {
  t0 = -kInf;
  t1 = kInf;
  for (int k = 0; k < 2; ++k) {
    if (N[k] == 0.0) {
      if (std::abs(X0[k]) >= r) return false;
      continue;
    }
    double ta = (-r - X0[k]) / N[k];
    double tb = (r - X0[k]) / N[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 < t1;
}

bool hits_preimage(const CloakSpec& spec, const Vec2& X0, const Vec2& N, double t_end) {
  double t0, t1;
  if (!square_interval(X0, N, spec.eps, t0, t1)) return false;
  return t1 > 0.0 && t0 < t_end;
}

void check_ray_inputs(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t_max) {
  spec.validate();
  if (!(inf_norm(source) > spec.outer())) throw DomainError("ray: source must lie in the ambient region");
  if (std::abs(N.norm() - 1.0) > 1e-12) throw DomainError("ray: direction must be a unit vector");
  if (!(t_max > 0.0)) throw DomainError("ray: t_max must be positive");
  if (hits_preimage(spec, source, N, t_max))
    throw DomainError("ray: undeformed line meets the pre-image square and ends on the inner boundary");
}

// Interface frame: unit normal n and tangent (-n2, n1).
struct InterfaceFrame {
  Vec2 n;
  Vec2 tangent() const { return {-n[1], n[0]}; }
  double gradient(const Vec2& d) const { return d.dot(tangent()) / d.dot(n); }
};

InterfaceFrame face_frame(int side) {
  switch (side) {
    case 1: return {Vec2(1, 0)};
    case 2: return {Vec2(0, 1)};
    case 3: return {Vec2(-1, 0)};
    default: return {Vec2(0, -1)};
  }
}

InterfaceFrame diagonal_frame(int side_a, int side_b) {
  const int lo = std::min(side_a, side_b);
  const int hi = std::max(side_a, side_b);
  Vec2 d;
  if (lo == 1 && hi == 2) d = Vec2(1, 1);
  else if (lo == 2 && hi == 3) d = Vec2(-1, 1);
  else if (lo == 3 && hi == 4) d = Vec2(-1, -1);
  else d = Vec2(1, -1);  // sides 1 and 4
  d.normalize();
  return {Vec2(d[1], -d[0])};
}

Mat2 jacobian_of(const CloakSpec& spec, const Vec2& x, const RegionTag& tag) {
  if (tag.kind != RegionKind::trapezoid) return Mat2::Identity();
  return jacobian_side(spec, x, tag.side).J;
}

RayEvent make_event(const RegionTag& from, const RegionTag& to, double t, const Vec2& x, const Vec2& din,
                    const Vec2& dout) {
  RayEvent ev;
  ev.t = t;
  ev.x = x;
  ev.from = from;
  ev.to = to;
  ev.dir_in = din;
  ev.dir_out = dout;
  InterfaceFrame frame{};
  if (from.kind == RegionKind::ambient) {
    ev.kind = RayEventKind::enter_cloak;
    frame = face_frame(to.side);
  } else if (to.kind == RegionKind::ambient) {
    ev.kind = RayEventKind::exit_cloak;
    frame = face_frame(from.side);
  } else {
    ev.kind = RayEventKind::internal_diagonal;
    frame = diagonal_frame(from.side, to.side);
  }
  ev.grad_in = frame.gradient(din);
  ev.grad_out = frame.gradient(dout);
  return ev;
}

}  // namespace

std::string_view to_string(RayEventKind kind) {
  switch (kind) {
    case RayEventKind::enter_cloak: return "enter-cloak";
    case RayEventKind::internal_diagonal: return "internal-diagonal";
    case RayEventKind::exit_cloak: return "exit-cloak";
    case RayEventKind::truncated: return "truncated";
  }
  return "enter-cloak";
}

Vec2 exact_position(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t) {
  return forward_map(spec, source + t * N);
}

double hamiltonian(const CloakSpec& spec, const Vec2& x, const Vec2& s, int side) {
  const Mat2 J = side == 0 ? Mat2::Identity() : jacobian_side(spec, x, side).J;
  return (spec.mu / spec.rho) * (J.transpose() * s).squaredNorm() - 1.0;
}

RayPath trace_exact(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t_max) {
  check_ray_inputs(spec, source, N, t_max);
  const double c = spec.wave_speed();

  // Breakpoints: entry/exit of the outer square and diagonal crossings inside it.
  std::vector<double> cuts{0.0, t_max};
  double tin, tout;
  if (square_interval(source, N, spec.outer(), tin, tout)) {
    for (double tc : {tin, tout})
      if (tc > 0.0 && tc < t_max) cuts.push_back(tc);
    const double denom1 = N[0] - N[1];
    const double denom2 = N[0] + N[1];
    for (double tc : {denom1 != 0.0 ? (source[1] - source[0]) / denom1 : -1.0,
                      denom2 != 0.0 ? -(source[0] + source[1]) / denom2 : -1.0})
      if (tc > std::max(0.0, tin) && tc < std::min(t_max, tout)) cuts.push_back(tc);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double p, double q) { return std::abs(p - q) < 1e-14; }),
             cuts.end());

  RayPath path;
  path.source = source;
  path.direction = N;

  auto state_at = [&](double t, const RegionTag& tag) {
    const Vec2 X = source + t * N;
    RayState st;
    st.t = t;
    st.region = tag;
    if (tag.kind == RegionKind::trapezoid) {
      st.x = forward_map_side(spec, X, tag.side);
      const Mat2 J = jacobian_side(spec, st.x, tag.side).J;
      st.s = J.inverse().transpose() * N / c;
    } else {
      st.x = X;
      st.s = N / c;
    }
    return st;
  };

  RegionTag prev_tag;
  Vec2 prev_dir = N;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double t0 = cuts[k];
    const double t1 = cuts[k + 1];
    const Vec2 Xmid = source + 0.5 * (t0 + t1) * N;
    RegionTag tag;
    if (inf_norm(Xmid) < spec.outer()) tag = {RegionKind::trapezoid, side_of(Xmid)};

    const RayState first = state_at(t0, tag);
    if (k > 0) {
      const Vec2 din = prev_dir;
      const Vec2 dout = jacobian_of(spec, first.x, tag) * N;
      path.events.push_back(make_event(prev_tag, tag, t0, first.x, din, dout));
    }
    path.polyline.push_back(first);

    if (tag.kind == RegionKind::trapezoid) {
      // Recursive bisection until chord midpoints match the curve.
      std::vector<double> ts;
      const int base = 8;
      auto refine = [&](auto&& self, double a, double b, const Vec2& xa, const Vec2& xb, int depth) -> void {
        const double m = 0.5 * (a + b);
        const Vec2 xm = forward_map_side(spec, source + m * N, tag.side);
        if (depth < 24 && (xm - 0.5 * (xa + xb)).norm() > 1e-7) {
          self(self, a, m, xa, xm, depth + 1);
          ts.push_back(m);
          self(self, m, b, xm, xb, depth + 1);
        }
      };
      for (int i = 0; i < base; ++i) {
        const double a = t0 + (t1 - t0) * i / base;
        const double b = t0 + (t1 - t0) * (i + 1) / base;
        if (i > 0) ts.push_back(a);
        refine(refine, a, b, forward_map_side(spec, source + a * N, tag.side),
               forward_map_side(spec, source + b * N, tag.side), 0);
      }
      for (double t : ts) path.polyline.push_back(state_at(t, tag));
    }
    const RayState last = state_at(t1, tag);
    path.polyline.push_back(last);
    prev_tag = tag;
    prev_dir = jacobian_of(spec, last.x, tag) * N;
  }
  return path;
}

namespace {

struct OdeState {
  Vec2 x;
  Vec2 s;
};

struct OdeSystem {
  const CloakSpec& spec;
  int side;
  double c;

  OdeState rhs(const OdeState& y) const {
    const Mat2 J = jacobian_side(spec, y.x, side).J;
    const auto dJ = jacobian_gradient_side(spec, y.x, side);
    const Vec2 v = J.transpose() * y.s;
    OdeState d;
    d.x = c * (J * v);
    for (int i = 0; i < 2; ++i) d.s[i] = -c * v.dot(dJ[static_cast<std::size_t>(i)].transpose() * y.s);
    return d;
  }

  OdeState rk4(const OdeState& y, double h) const {
    const OdeState k1 = rhs(y);
    const OdeState k2 = rhs({y.x + 0.5 * h * k1.x, y.s + 0.5 * h * k1.s});
    const OdeState k3 = rhs({y.x + 0.5 * h * k2.x, y.s + 0.5 * h * k2.s});
    const OdeState k4 = rhs({y.x + h * k3.x, y.s + h * k3.s});
    return {y.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            y.s + h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s)};
  }

  // Step doubling with Richardson extrapolation; returns the error estimate.
  double step(const OdeState& y, double h, OdeState& out) const {
    const OdeState full = rk4(y, h);
    const OdeState half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double ex = (half.x - full.x).lpNorm<Eigen::Infinity>();
    const double es = (half.s - full.s).lpNorm<Eigen::Infinity>() / std::max(1.0, half.s.lpNorm<Eigen::Infinity>());
    out.x = half.x + (half.x - full.x) / 15.0;
    out.s = half.s + (half.s - full.s) / 15.0;
    return std::max(ex, es);
  }
};

}  // namespace

RayPath trace_ode(const CloakSpec& spec, const Vec2& source, const Vec2& N, double t_max, double tol) {
  check_ray_inputs(spec, source, N, t_max);
  if (!(tol > 0.0)) throw DomainError("trace_ode: tolerance must be positive");
  const double c = spec.wave_speed();

  RayPath path;
  path.source = source;
  path.direction = N;

  auto ambient_state = [&](const Vec2& x, double t) {
    RayState st;
    st.x = x;
    st.s = N / c;
    st.t = t;
    return st;
  };

  // Ambient rays are straight; find where this one meets the cloak.
  double tin, tout;
  if (!square_interval(source, N, spec.outer(), tin, tout) || tin >= t_max || tout <= 0.0) {
    path.polyline.push_back(ambient_state(source, 0.0));
    path.polyline.push_back(ambient_state(source + t_max * N, t_max));
    return path;
  }
  path.polyline.push_back(ambient_state(source, 0.0));
  double t = tin;
  Vec2 x = source + tin * N;
  path.polyline.push_back(ambient_state(x, t));

  RegionTag tag{RegionKind::trapezoid, side_of(x)};
  auto reset_slowness = [&](const Vec2& at, int side) {
    return Vec2(jacobian_side(spec, at, side).J.inverse().transpose() * N / c);
  };
  OdeState y{x, reset_slowness(x, tag.side)};
  {
    const Mat2 J = jacobian_side(spec, x, tag.side).J;
    path.events.push_back(make_event(RegionTag{}, tag, t, x, N, c * J * J.transpose() * y.s));
    RayState st{x, y.s, tag, t};
    path.polyline.push_back(st);
  }

  const double scale = spec.outer();
  double h = 1e-3 * scale;
  const double h_max = 0.05 * scale;
  const double h_min = 1e-14 * scale;

  while (t < t_max) {
    h = std::min({h, h_max, t_max - t});
    OdeState next;
    const double err = OdeSystem{spec, tag.side, c}.step(y, h, next);
    if (err > tol) {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      if (h < h_min) {
        path.truncated = true;
        RayEvent ev;
        ev.kind = RayEventKind::truncated;
        ev.t = t;
        ev.x = y.x;
        ev.from = ev.to = tag;
        path.events.push_back(ev);
        return path;
      }
      continue;
    }

    const RegionTag new_tag = classify(spec, next.x);
    if (new_tag == tag) {
      y = next;
      t += h;
      path.polyline.push_back({y.x, y.s, tag, t});
      h *= std::min(2.0, 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2));
      continue;
    }

    // Locate the crossing: lo stays in the current region, hi is past it.
    const OdeSystem sys{spec, tag.side, c};
    double lo = 0.0;
    double hi = h;
    OdeState past = next;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const OdeState trial = sys.rk4(y, mid);
      if (classify(spec, trial.x) == tag) {
        lo = mid;
      } else {
        hi = mid;
        past = trial;
      }
    }
    const Mat2 Jold = jacobian_side(spec, past.x, tag.side).J;
    const Vec2 din = c * Jold * Jold.transpose() * past.s;
    path.polyline.push_back({past.x, past.s, tag, t + hi});
    t += hi;
    const RegionTag to = classify(spec, past.x);

    if (to.kind == RegionKind::ambient) {
      path.events.push_back(make_event(tag, to, t, past.x, din, N));
      path.polyline.push_back(ambient_state(past.x, t));
      if (t < t_max) path.polyline.push_back(ambient_state(past.x + (t_max - t) * N, t_max));
      return path;
    }
    if (to.kind == RegionKind::inclusion) {
      path.truncated = true;
      RayEvent ev;
      ev.kind = RayEventKind::truncated;
      ev.t = t;
      ev.x = past.x;
      ev.from = tag;
      ev.to = to;
      path.events.push_back(ev);
      return path;
    }
    y = {past.x, reset_slowness(past.x, to.side)};
    const Mat2 Jnew = jacobian_side(spec, past.x, to.side).J;
    path.events.push_back(make_event(tag, to, t, past.x, din, c * Jnew * Jnew.transpose() * y.s));
    tag = to;
    path.polyline.push_back({y.x, y.s, tag, t});
  }
  return path;
}

double exit_gradient(const CloakSpec& spec, double x2_exit, double M) {
  const double a = spec.a, w = spec.w, e = spec.eps;
  return M * (a + w - e) / w - x2_exit * (a - e) / ((a + w) * w);
}

bool negative_refraction_inequality(const CloakSpec& spec, double x2_exit, double M) {
  // m* = A M - B x2 with A, B > 0, so m* M < 0 iff M and x2 - (A/B) M share a sign.
  const double a = spec.a, w = spec.w, e = spec.eps;
  const double ratio = (a + w - e) * (a + w) / (a - e);
  if (M > 0.0) return x2_exit > ratio * M;
  if (M < 0.0) return x2_exit < ratio * M;
  return false;
}

double axial_threshold(const CloakSpec& spec) { return -spec.outer() * spec.w / (spec.a - spec.eps); }

bool thin_cloak(const CloakSpec& spec) { return spec.w <= spec.a - spec.eps; }

bool RefractionReport::any() const {
  return std::any_of(faces.begin(), faces.end(), [](const FaceRefraction& f) { return f.negative(); });
}

RefractionReport negative_refraction_predicate(const CloakSpec& spec, const Vec2& source, int samples) {
  spec.validate();
  if (!(inf_norm(source) > spec.outer())) throw DomainError("negative refraction: source must lie in the ambient region");
  if (samples < 1) throw DomainError("negative refraction: samples must be positive");
  RefractionReport rep;
  rep.source = source;
  const double b = spec.outer();
  for (int face = 1; face <= 4; ++face) {
    // Rotate the plane so that this face becomes the right face.
    const double ang = -0.5 * kPi * (face - 1);
    Mat2 R;
    R << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    const Vec2 S = R * source;
    FaceRefraction& fr = rep.faces[static_cast<std::size_t>(face - 1)];
    fr.face = face;
    if (!(S[0] < b)) continue;
    for (int i = 0; i < samples; ++i) {
      const double x2 = -b + (i + 0.5) * 2.0 * b / samples;
      const Vec2 E(b, x2);
      const Vec2 d = E - S;
      if (hits_preimage(spec, S, d.normalized(), d.norm())) continue;
      ++fr.exiting_rays;
      const double M = d[1] / d[0];
      if (exit_gradient(spec, x2, M) * M < 0.0) ++fr.negative_rays;
    }
  }
  return rep;
}

void write_ray_csv(std::ostream& out, const RayPath& path) {
  out << "t,x1,x2,s1,s2,region\n";
  for (const RayState& st : path.polyline)
    csv::write_row(out, {csv::num(st.t), csv::num(st.x[0]), csv::num(st.x[1]), csv::num(st.s[0]), csv::num(st.s[1]),
                         to_string(st.region)});
}

}  // namespace cloaksim
