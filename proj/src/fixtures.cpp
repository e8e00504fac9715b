#include "bcert/fixtures.hpp"

#include <cmath>

#include "bcert/errors.hpp"
#include "bcert/parse.hpp"

namespace bcert {

namespace {

Box box(std::initializer_list<Interval> dims) { return Box(std::vector<Interval>(dims)); }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_ring(std::string_view name, std::size_t n) {
  if (n < 2) throw InputError(std::string(name) + " is a ring and needs N >= 2 (got " + std::to_string(n) + ")");
}

void wire_identity(NetworkSpec& net) {
  for (const auto& e : net.edges) {
    auto& s = net.subsystems[net.index_of(e.from)];
    if (!s.internal_outputs.count(e.to)) s.internal_outputs[e.to] = identity_outputs(s.state_space);
  }
}

CbcCertificate cbc(int mode, Polynomial b, CertConstants k) {
  CbcCertificate c;
  c.mode = mode;
  c.barrier = std::move(b);
  c.constants = k;
  return c;
}

}  // namespace

SubsystemSpec room_subsystem(const std::string& id) {
  constexpr double eta = 0.005, beta = 0.022, theta = 0.05, Th = 50.0, Te = -1.0;
  SubsystemBuilder b;
  b.id = id;
  b.state = {"T"};
  b.input = {"wl", "wr"};
  b.noise = {"v"};
  for (int p = 1; p <= 7; ++p) {
    const double bp = 0.1 * (p - 1);
    const double a = 1.0 - 2.0 * eta - beta - theta * bp;
    b.modes.push_back({num(a) + "*T + " + num(eta) + "*(wl + wr) + " + num(theta * Th * bp + beta * Te) + " + 0.25*v"});
  }
  b.X = BoxSet::single(box({{1, 50}}));
  b.X0 = BoxSet::single(box({{19, 21}}));
  b.X1 = BoxSet(1, {box({{1, 17}}), box({{23, 50}})});
  b.W = BoxSet::single(box({{1, 50}, {1, 50}}));
  return b.build();
}

Polynomial room_barrier(const SpacePtr& state_space) {
  return parse_polynomial("-0.00012*T^4 + 0.01045*T^3 - 0.19932*T^2 - 0.64538*T + 28.68175", state_space);
}

CertConstants room_constants() {
  CertConstants k;
  k.gamma = 0.16;
  k.lambda = 1.2;
  k.psi = 7.07e-4;
  k.kappa = 0.99;
  k.alpha = {4.5e-5, 2.0};
  k.rho = {9.3e-6, 2.0};
  return k;
}

Fixture room_temp(std::size_t n) {
  require_ring("room-temp", n);
  Fixture f;
  f.name = "room-temp";
  f.n = n;
  for (std::size_t i = 0; i < n; ++i) f.net.subsystems.push_back(room_subsystem("room" + std::to_string(i + 1)));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& to = f.net.subsystems[i].id;
    f.net.edges.push_back({f.net.subsystems[(i + n - 1) % n].id, to, 0});
    f.net.edges.push_back({f.net.subsystems[(i + 1) % n].id, to, 1});
  }
  wire_identity(f.net);
  const auto& ss = f.net.subsystems.front().state_space;
  for (int p = 1; p <= 7; ++p) f.cbcs.push_back(cbc(p, room_barrier(ss), room_constants()));
  f.common_barrier = true;
  f.horizon = 10;
  f.claimed_probability = 0.87;
  return f;
}

SubsystemSpec two_mode_subsystem(const std::string& id) {
  SubsystemBuilder b;
  b.id = id;
  b.state = {"x1", "x2"};
  b.input = {"u1", "u2"};
  b.noise = {"v1", "v2"};
  b.modes = {
      {"0.05*x1 + 0.01*u1 - 0.9 + 0.1*v1", "0.9*x1 + 0.03*x2 + 0.01*u2 + 0.5 + 0.1*v2"},
      {"0.02*x1 - 1.2*x2 + 0.01*u1 + 0.9 + 0.1*v1", "0.05*x2 + 0.01*u2 - 0.2 + 0.1*v2"},
  };
  b.X = BoxSet::single(box({{-6, 6}, {-6, 6}}));
  b.X0 = BoxSet::single(box({{-0.5, 0.5}, {-0.5, 0.5}}));
  b.X1 = BoxSet(2, {box({{-6, -2}, {-6, -2}}), box({{2, 6}, {2, 6}})});
  b.W = BoxSet::single(box({{-6, 6}, {-6, 6}}));
  return b.build();
}

std::vector<CbcCertificate> two_mode_cbcs(const SpacePtr& ss) {
  CertConstants k1, k2;
  k1.gamma = 0.15, k1.lambda = 2.4, k1.kappa = 0.469, k1.psi = 5.42e-6;
  k1.alpha = {4e-5, 1.0}, k1.rho = {2.71e-6, 1.0};
  k2.gamma = 0.16, k2.lambda = 2.3, k2.kappa = 0.498, k2.psi = 6.88e-6;
  k2.alpha = {5e-5, 1.0}, k2.rho = {3.44e-6, 1.0};
  return {
      cbc(1, parse_polynomial("0.2309*x1^2 + 0.1160*x1*x2 + 0.000001*x1 + 0.2529*x2^2 - 0.000001*x2 + 0.000000002", ss),
          k1),
      cbc(2, parse_polynomial("0.2394*x1^2 + 0.1101*x1*x2 - 0.000002*x1 + 0.2588*x2^2 - 0.000008*x2 + 0.000000005", ss),
          k2),
  };
}

Fixture two_mode(std::size_t n) {
  require_ring("two-mode", n);
  Fixture f;
  f.name = "two-mode";
  f.n = n;
  for (std::size_t i = 0; i < n; ++i) f.net.subsystems.push_back(two_mode_subsystem("sub" + std::to_string(i + 1)));
  for (std::size_t i = 0; i < n; ++i) f.net.edges.push_back({f.net.subsystems[(i + n - 1) % n].id, f.net.subsystems[i].id, 0});
  wire_identity(f.net);
  f.cbcs = two_mode_cbcs(f.net.subsystems.front().state_space);
  f.dwell = DwellParams{2.0, 2.0, 3};
  f.horizon = 100;
  f.claimed_probability = 0.86;
  return f;
}

Fixture make_fixture(std::string_view name, std::size_t n) {
  if (name == "room-temp") return room_temp(n);
  if (name == "two-mode") return two_mode(n);
  throw InputError("unknown fixture '" + std::string(name) + "' (expected room-temp or two-mode)");
}

std::vector<std::string> fixture_names() { return {"room-temp", "two-mode"}; }

SubsystemSpec contraction_1d() {
  SubsystemBuilder b;
  b.id = "contraction";
  b.state = {"x"};
  b.noise = {"v"};
  b.modes = {{"0.5*x + 0.1*v"}};
  b.X = BoxSet::single(box({{-1, 1}}));
  b.X0 = BoxSet::single(box({{-0.1, 0.1}}));
  b.X1 = BoxSet(1, {box({{-1, -0.8}}), box({{0.8, 1}})});
  b.W = BoxSet(0);
  return b.build();
}

}  // namespace bcert
