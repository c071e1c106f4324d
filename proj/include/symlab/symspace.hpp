#pragma once
// Symmetric pairs, Cartan subspaces, restricted roots and Weyl chambers.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symlab/lie_core.hpp"

namespace symlab {

enum class InvolutionKind { DiagonalConjugation, ComplexConjugation };

struct SpaceSpec {
  std::string tag;      // e.g. "sphere3", "cp2", "su_so3", "grass2_3"
  std::string family;   // sphere, rp, cp, hp, su_so, grass
  int n = 0;
  int p = 0;            // grass only
  std::string algebra;  // so, su, sp
  int algebra_n = 0;
  std::string label;    // G/K
};

/// Parse a catalog tag; throws Error on unknown tags or out-of-range sizes.
SpaceSpec parse_space(const std::string& tag);
/// Catalog tags covered by the acceptance suite.
std::vector<std::string> catalog_tags();

struct SymmetricPair {
  SpaceSpec space;
  AlgebraBasis algebra;
  InvolutionKind involution_kind = InvolutionKind::DiagonalConjugation;
  Vec s_diag;          // conjugating diagonal (DiagonalConjugation)
  Mat involution;      // sigma in basis coordinates
  Mat k_basis;         // columns orthonormal, +1 eigenspace
  Mat m_basis;         // columns orthonormal, -1 eigenspace
  std::vector<Vec> cartan_seeds;

  CMat apply_involution(const CMat& x) const;
  Vec project_k(const Vec& x) const;
  Vec project_m(const Vec& x) const;
};

struct PairDiagnostics {
  double involution_square;
  double kk_in_k;
  double km_in_m;
  double mm_in_k;
  double k_perp_m;
};

/// trace_coefficient <= 0 selects the catalog default (normalized for rank one).
SymmetricPair build_pair(const std::string& tag, double trace_coefficient = 0.0);
PairDiagnostics diagnose_pair(const SymmetricPair& pair);

/// Maximal abelian subspace of m; columns orthonormal coefficient vectors.
Mat cartan_subspace(const SymmetricPair& pair, std::uint64_t seed = 1, int attempts = 5);

struct RootRecord {
  Vec lambda_r;   // values lambda_R(X_j)
  int multiplicity = 0;
  Mat m_basis;    // xi^s as columns
  Mat k_basis;    // zeta^s as columns
  double value(const Vec& a_coords) const { return lambda_r.dot(a_coords); }
};

struct ChamberData {
  std::vector<int> simple_roots;  // indices into positive_roots
  std::vector<Vec> wall_covectors;
  double theta_max = 0.0;         // rank 2 only
  double theta_start = 0.0;       // angle of the first boundary ray (rank 2)
  Vec witness;                    // unit vector in a-coordinates
};

struct RestrictedRootData {
  Mat cartan_basis;
  std::vector<RootRecord> positive_roots;
  Mat centralizer_basis;
  std::vector<std::pair<int, int>> doubled;  // (i, j): root j = 2 root i
  ChamberData chamber;

  int rank() const { return static_cast<int>(cartan_basis.cols()); }
  int root_dim() const;  // sum of multiplicities
  int mbar_dim() const { return rank() + 2 * root_dim(); }
  /// Orthonormal basis of mbar: a block, every m_lambda, then every k_lambda.
  Mat mbar_basis() const;
  std::vector<std::string> mbar_labels() const;
};

struct DecomposeOptions {
  std::uint64_t seed = 1;
  int attempts = 5;
  double cluster_tol = 1e-6;
};

RestrictedRootData restricted_root_decomposition(const SymmetricPair& pair, const Mat& a_basis,
                                                 const DecomposeOptions& opt = {});
ChamberData chamber_geometry(const std::vector<RootRecord>& roots, int rank);

struct Decomposition {
  SymmetricPair pair;
  RestrictedRootData roots;
};

Decomposition decompose(const std::string& tag, const DecomposeOptions& opt = {},
                        double trace_coefficient = 0.0);

struct RootDiagnostics {
  double pairing;           // eq. pairing residual, max over j, lambda, s
  double zeta_orthonormal;
  double h_commutes_a;
  double root_orthogonality;
  double completeness;      // 0 when dimensions add up
  double min_witness_value;
};
RootDiagnostics diagnose_roots(const SymmetricPair& pair, const RestrictedRootData& roots);

/// (m_eps, m_eps/2) for a rank-one decomposition.
std::pair<int, int> rank_one_multiplicities(const RestrictedRootData& roots);

enum class ChartKind { RankOnePoint, RankTwoArc, Generic };

class SphereChart {
 public:
  SphereChart(const RestrictedRootData& roots, double radius);

  ChartKind kind() const { return kind_; }
  double radius() const { return radius_; }
  int rank() const { return rank_; }

  /// w(theta) = r(cos(theta0+theta) X_1 + sin(theta0+theta) X_2), a-coordinates.
  Vec arc_point(double theta) const;
  /// Default sample grid in a-coordinates.
  std::vector<Vec> samples(std::uint64_t seed = 1, int count = 10) const;

  static int default_j0(const Vec& w);
  /// Y_j(w) in a-coordinates; also the coordinates of P_j(w) in the W-slot.
  static Vec y_field(const Vec& w, int j, int j0);

 private:
  ChartKind kind_;
  double radius_;
  int rank_;
  ChamberData chamber_;
  std::vector<Vec> coweights_;
};

/// alpha(mu1, mu2) = 1/2 [mu1, mu2]_m + U(mu1, mu2) for m-elements.
Vec connection_bilinear(const SymmetricPair& pair, const Vec& mu1, const Vec& mu2);
/// U(mu1, mu2) alone.
Vec connection_u(const SymmetricPair& pair, const Vec& mu1, const Vec& mu2);
/// Coefficients of k x k^{-1}; throws when the expansion leaves the algebra.
Vec adjoint_action(const SymmetricPair& pair, const CMat& k, const Vec& x, double tol = 1e-9);

}  // namespace symlab
