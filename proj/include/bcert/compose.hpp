#pragma once

#include <span>
#include <string>
#include <vector>

#include "bcert/certificate.hpp"
#include "bcert/model.hpp"

namespace bcert {

// Cross gain kappa_ij = rho_i o alpha_j^-1 for an edge where j feeds i.
struct GainEdge {
  std::size_t to;    // i
  std::size_t from;  // j
  PowerLawFn gain;
};

struct GainDigraph {
  std::vector<std::string> ids;
  std::vector<double> self_gain;  // kappa_i
  std::vector<GainEdge> edges;

  std::size_t size() const { return self_gain.size(); }
  bool linear() const;  // every cross-gain exponent equals 1
};

GainDigraph build_gain_digraph(const NetworkSpec& net, std::span<const ApbcCertificate> apbcs);

struct SmallGainResult {
  bool satisfied = false;
  double max_cycle_mean = 0.0;  // of log-coefficients; -inf when acyclic
  std::vector<std::size_t> cycle;  // violating cycle (node indices in traversal order)
  std::string reason;
};

// Every kappa_i < 1 and the maximum cycle mean of log c_ij is negative
// (Karp). Throws CapabilityError for nonlinear gains.
SmallGainResult small_gain_check(const GainDigraph& g);

// Sufficient fallback that needs no cycle analysis: every c_ij < 1 and every
// kappa_i < 1. Only meaningful for linear gains.
bool pairwise_gain_check(const GainDigraph& g);

// Maximum cycle mean of the log cross gains (Karp, all nodes as sources).
// Returns -inf for acyclic graphs; `cycle` receives a cycle attaining it.
double max_cycle_mean(const GainDigraph& g, std::vector<std::size_t>* cycle = nullptr);

// s_i with c_ij s_j / s_i < 1 on every edge; identity when every c_ij < 1.
std::vector<double> find_sigma(const GainDigraph& g);

// Largest c_ij s_j / s_i over all edges (0 without edges).
double scaled_cross_gain(const GainDigraph& g, std::span<const double> s);

// Union when every lambda_i is equal, product otherwise.
UnsafeSemantics default_semantics(std::span<const ApbcCertificate> apbcs);

AbcCertificate compose_abc(const NetworkSpec& net, std::span<const ApbcCertificate> apbcs,
                           std::span<const double> scalings, UnsafeSemantics semantics);

}  // namespace bcert
