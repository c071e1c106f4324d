#pragma once
// Invariant frame calculus at points (o_H, w) of G/H x W and G/H x S_W(r).
//
// A tangent vector is a pair (mbar coordinates, W-slot a-coordinates). The
// mbar coordinates refer to RestrictedRootData::mbar_basis(): a block, every
// xi^s_lambda, then every zeta^s_lambda. Fields are evaluated on jets so that
// directional derivatives along the W-slot come out exactly.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "symlab/jet.hpp"
#include "symlab/qcatalog.hpp"
#include "symlab/symspace.hpp"

namespace symlab {

template <class T>
struct TangentT {
  std::vector<T> m;
  std::vector<T> u;
};
using Tangent = TangentT<double>;
using JTangent = TangentT<Jet>;

using Field = std::function<JTangent(const std::vector<Jet>& w)>;

enum class DerivMode { Analytic, FiniteDifference };

/// Bracket tensor of mbar and slot bookkeeping, built once per decomposition.
class FrameContext {
 public:
  FrameContext(const SymmetricPair& pair, const RestrictedRootData& roots);

  const RestrictedRootData& roots() const { return *roots_; }
  const SymmetricPair& pair() const { return *pair_; }
  int rank() const { return rank_; }
  int root_dim() const { return root_dim_; }
  int mbar_dim() const { return mbar_dim_; }
  int ambient_dim() const { return mbar_dim_ + rank_; }
  /// Positive-root index owning root slot s (0 <= s < root_dim).
  int root_of_slot(int s) const { return slot_root_[s]; }
  int xi_index(int s) const { return rank_ + s; }
  int zeta_index(int s) const { return rank_ + root_dim_ + s; }
  /// First root slot of positive root i.
  int first_slot(int i) const { return first_slot_[i]; }
  const Mat& mbar_basis() const { return mbar_; }
  const std::vector<double>& bracket_tensor() const { return c_; }
  /// Largest h-component discarded by the projection, over basis pairs.
  double discarded_h_norm() const { return h_norm_; }

  /// [a, b] projected onto mbar, in mbar coordinates.
  Vec bracket(const Vec& a, const Vec& b) const;

 private:
  const SymmetricPair* pair_;
  const RestrictedRootData* roots_;
  int rank_;
  int root_dim_;
  int mbar_dim_;
  Mat mbar_;
  std::vector<double> c_;
  std::vector<int> slot_root_;
  std::vector<int> first_slot_;
  double h_norm_ = 0.0;
};

Tangent value_of(const JTangent& t);
Field constant_field(const Tangent& t);
/// Value of a field at w (no derivative).
Tangent eval_field(const Field& f, const Vec& w);
/// Derivative of a field at w along dir.
Tangent derive_field(const Field& f, const Vec& w, const Vec& dir, DerivMode mode = DerivMode::Analytic);

/// ([a,b]_mbar + D_alpha b - D_beta a, D_alpha beta - D_beta alpha).
Tangent field_bracket(const FrameContext& ctx, const Field& a, const Field& b, const Vec& w,
                      DerivMode mode = DerivMode::Analytic);

enum class FrameKind { FullW, Sphere };

struct FrameAtPoint {
  const FrameContext* ctx = nullptr;
  FrameKind kind = FrameKind::FullW;
  Vec w;
  double radius = 0.0;  // sphere frames
  int j0 = -1;          // sphere frames of rank >= 2
  std::vector<Field> fields;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(fields.size()); }
  /// Ambient coordinates of the frame vectors at w, one column each.
  Mat matrix() const;
  /// Least-squares frame coordinates of an ambient tangent vector.
  Vec coordinates(const Tangent& t, double* residual = nullptr) const;
};

FrameAtPoint full_frame(const FrameContext& ctx, const Vec& w);
/// Sphere frame [xi^S, (Y_j,0), (0,P_j) for j != j0, xi's, zeta's]; rank one
/// keeps only xi^S and the roots. j0 < 0 selects argmax |w_j|.
FrameAtPoint sphere_frame(const FrameContext& ctx, const Vec& w, double radius, int j0 = -1);

// Pointwise structure maps, shared by fields and tensor packs.
template <class T>
TangentT<T> apply_j(const FrameContext& ctx, const CoefficientSet<T>& cs, const TangentT<T>& x);
template <class T>
TangentT<T> apply_phi(const FrameContext& ctx, const CoefficientSet<T>& cs, const std::vector<T>& w,
                      double radius, const TangentT<T>& x);
template <class T>
T metric(const FrameContext& ctx, const CoefficientSet<T>& cs, const TangentT<T>& x, const TangentT<T>& y);
template <class T>
T eta(const FrameContext& ctx, const CoefficientSet<T>& cs, const std::vector<T>& w, double radius,
      const TangentT<T>& x);

/// Fields built from a structure profile.
Field j_field(const FrameContext& ctx, const StructureProfile& sp, Field a);
Field phi_field(const FrameContext& ctx, const StructureProfile& sp, Field a);
/// xi = xi^S / a0 = (w / (a0 r), 0).
Field reeb_field(const FrameContext& ctx, const StructureProfile& sp);
Field standard_xi_field(const FrameContext& ctx, double radius);

struct TensorPack {
  std::vector<std::string> labels;
  Mat g;
  Mat j_or_phi;
  Vec eta;    // empty in full-W mode
  Vec xi;     // frame coordinates; empty in full-W mode
  Mat dtheta;
  Mat omega;
  double frame_residual = 0.0;  // largest least-squares residual of J/phi images
};

/// Standard structure (J^S, g^S) on a full-W frame.
TensorPack standard_structure_at(const FrameAtPoint& frame);
TensorPack structure_at(const FrameAtPoint& frame, const StructureProfile& sp);

/// 1/2 (<u,nu> - <v,mu> - <[w,mu],nu>) on frame pairs.
Mat dtheta_at(const FrameAtPoint& frame);
/// Same form through the exterior derivative of the canonical 1-form.
Mat dtheta_exterior_at(const FrameAtPoint& frame, DerivMode mode = DerivMode::Analytic);

/// d eta(A,B) = 1/2 (A eta(B) - B eta(A) - eta([A,B])) on frame pairs.
Mat deta_at(const FrameAtPoint& frame, const StructureProfile& sp);
/// max |d eta(A,B) - g(A, phi B)| over frame pairs.
double contact_residual(const FrameAtPoint& frame, const StructureProfile& sp);

struct CompatibilityResiduals {
  double phi_square;   // phi^2 + I - eta (x) xi
  double metric;       // g(phi A, phi B) - g(A,B) + eta(A) eta(B)
  double eta_xi;       // eta(xi) - 1
  double j_square;     // J^2 + I (full-W)
  double hermitian;    // g(JA, JB) - g(A,B) (full-W)
};
CompatibilityResiduals compatibility(const FrameAtPoint& frame, const StructureProfile& sp);

/// (L_xi g)(A,B) on frame pairs; xi is the Reeb field, or xi^S when standard is set.
Mat lie_derivative_metric(const FrameAtPoint& frame, const StructureProfile& sp, bool standard_xi = false);

struct NijenhuisReport {
  double max_norm = 0.0;
  /// zeta^s-coefficient of N((X_j,0),(xi^s,0)) minus the closed form, max over j, s.
  double closed_form_gap = 0.0;
  /// Largest |closed form| over the same components.
  double closed_form_max = 0.0;
  Mat components;  // rows j, cols root slots: zeta-coefficient of N((X_j,0),(xi^s,0))
};
/// N(A,B) = [A,B] + J[JA,B] + J[A,JB] - [JA,JB] on a full-W frame.
NijenhuisReport nijenhuis_at(const FrameAtPoint& frame, const StructureProfile& sp,
                             DerivMode mode = DerivMode::Analytic);

/// h = 1/2 L_xi phi as a matrix in frame coordinates.
Mat h_tensor(const FrameAtPoint& frame, const StructureProfile& sp);

struct NormalityReport {
  double max_norm = 0.0;
  /// Per root slot: zeta-coefficient of N(xi, xi^s).
  std::vector<double> xi_root;
  /// Per j != j0: W-slot coefficient of N(xi, (Y_j,0)) along P_j, rank >= 2.
  std::vector<double> xi_y;
  /// Largest deviation of N(xi, (Y_j,0)) from a multiple of (0, P_j).
  double xi_y_off_direction = 0.0;
};
/// [phi,phi](A,B) + 2 d eta(A,B) xi with [phi,phi] = phi^2[A,B] + [phiA,phiB] - phi[phiA,B] - phi[A,phiB].
NormalityReport normality_tensor_at(const FrameAtPoint& frame, const StructureProfile& sp);

struct KoszulReport {
  Mat nabla_xi;                     // column A: frame coordinates of nabla_A xi
  std::vector<double> nabla_root;   // per root slot: zeta-coefficient of nabla_{xi^s} xi
  double structure_residual = 0.0;  // max |nabla_A xi + phi A + phi h A|
};
/// Levi-Civita data of a rank-one sphere frame; throws on rank >= 2.
KoszulReport koszul_at(const FrameAtPoint& frame, const StructureProfile& sp);

/// Largest relative gap between analytic and Richardson finite-difference
/// derivatives of the frame fields and of J/phi applied to them.
double derivative_crosscheck(const FrameAtPoint& frame, const StructureProfile& sp);

/// Matrix of Ad_k on mbar coordinates for k in the centralizer group H.
Mat ad_on_mbar(const FrameContext& ctx, const CMat& k);

}  // namespace symlab
