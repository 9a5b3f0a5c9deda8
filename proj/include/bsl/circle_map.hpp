#pragma once

#include "bsl/combinatorics.hpp"
#include "bsl/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bsl {

// Piecewise-affine circle map; branch j is x -> lambda (x - z_j) + c_j mod 1
// on I_j = [z_j, z_{zeta(j)}). The decimal strings are the exact definition;
// the Scalars are enclosures at `precision_bits`.
class CircleMap {
public:
    CircleMap() = default;
    CircleMap(Combinatorics comb, std::string lambda, std::vector<std::string> z,
              std::vector<std::string> c, mpfr_prec_t precision_bits);

    const Combinatorics& comb() const { return comb_; }
    int n() const { return comb_.n(); }
    mpfr_prec_t precision() const { return prec_; }
    CircleMap at_precision(mpfr_prec_t bits) const;

    const std::string& lambda_str() const { return lambda_str_; }
    const std::vector<std::string>& z_str() const { return z_str_; }
    const std::vector<std::string>& c_str() const { return c_str_; }

    const Scalar& lambda() const { return lambda_; }
    const Scalar& z(int j) const { return z_[j]; }
    const Scalar& c(int j) const { return c_[j]; }
    // |I_j| as an enclosure in (0,1).
    const Scalar& length(int j) const { return len_[j]; }

    // Branch index with x in I_j; throws AmbiguousBranch.
    int locate(const Scalar& x) const;
    Where classify(const Scalar& x, int j) const;
    Scalar eval_branch(int j, const Scalar& x) const;
    Scalar eval(const Scalar& x) const;
    Scalar eval_left_limit(int j) const;
    // Preimage of y under branch j, if y lies in Phi(I_j) (closure).
    std::optional<Scalar> inverse_branch(int j, const Scalar& y) const;
    // Unique fixed point of branch j in I_j; throws if none.
    Scalar fixed_point(int j) const;

private:
    Combinatorics comb_;
    std::string lambda_str_;
    std::vector<std::string> z_str_, c_str_;
    mpfr_prec_t prec_ = 256;
    Scalar lambda_;
    std::vector<Scalar> z_, c_, len_;
};

struct OrbitDatum {
    int j = 0;
    std::vector<Scalar> right_orbit;   // Phi^m(Phi_j(z_j)), m = 0..k(j)-1
    std::vector<Scalar> left_orbit;    // Phi^m(Phi_{zeta^-1 j}(z_j)), m = 0..k(j)-1
    Scalar merge_point;
    int host = -1;                     // a_j with Z_j in I_{a_j}
    int merge_step = -1;               // first m with equal orbits
};

OrbitDatum orbit_datum(const CircleMap& map, int j, double eps = -1.0);

struct ConditionResult {
    std::string name;
    bool pass = true;
    std::string witness;
    std::vector<std::string> warnings;
};

struct ValidationReport {
    std::vector<ConditionResult> conditions;   // SE, E+, E-, EC, expanding_fixed_points
    std::vector<OrbitDatum> orbits;
    bool ok() const;
    const ConditionResult& get(const std::string& name) const;
};

ValidationReport validate_conditions(const CircleMap& map, double eps = -1.0);

struct SolverOptions {
    double offset_fraction = 0.3;        // position inside the feasible offset interval
    mpfr_prec_t precision_bits = 256;    // working precision of the emitted map
    int scan_points = 600;               // lambda bracket scan
    std::vector<std::string> cutting_points;   // default equal spacing
};

struct SolverResult {
    CircleMap map;
    Scalar lambda;
    double residual = 0;                 // max |EC mismatch| at the emitted decimals
    Scalar t_lo, t_hi;                   // feasible interval of the free offset
};

SolverResult solve_even_model(const Combinatorics& comb, const SolverOptions& opt = {});

std::vector<int> itinerary(const CircleMap& map, const Scalar& x, int n);

CircleMap markovize(const CircleMap& map, double eps = -1.0);

struct MarkovPartition {
    std::vector<Scalar> points;          // sorted partition points in [0,1)
    std::vector<std::vector<int>> matrix;
};

MarkovPartition markov_partition(const CircleMap& markov_map, double eps = -1.0);

struct PerronData {
    std::vector<std::vector<int>> transition_matrix;
    Scalar spectral_radius;
    int iterations = 0;
};

PerronData perron_root(const std::vector<std::vector<int>>& matrix, mpfr_prec_t prec = 256,
                       double rel_width = 1e-12);
PerronData perron_data(const CircleMap& markov_map, double eps = -1.0);

} // namespace bsl
