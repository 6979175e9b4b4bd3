#include "idsq/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>

#include "idsq/cholesky.hpp"
#include "idsq/eigen.hpp"
#include "idsq/error.hpp"

namespace idsq {

namespace {

constexpr double kOrthogonalityTol = 1e-10;
constexpr double kTieTol = 1e-10;
constexpr double kZeroTol = 1e-10;
constexpr double kWitnessTol = 1e-10;
constexpr double kSignTol = 1e-12;

double orthogonality_error_of(const Matrix& u) {
  const Matrix g = u.transpose() * u;
  return max_abs_diff(g, Matrix::identity(u.rows()));
}

Matrix polar_step(const Matrix& u) {
  const Matrix g = u.transpose() * u;
  return 0.5 * (u * (3.0 * Matrix::identity(u.rows()) - g));
}

bool near_tie(double x, double y) {
  return std::abs(x - y) <= kTieTol * std::max(std::abs(x), std::abs(y));
}

Matrix rotation(double c, double s) { return Matrix{{c, -s}, {s, c}}; }

// A 2 + 2 matrix expressed in a rotated frame: a == diag(u1, u2)^T A diag(u1, u2).
struct Frame {
  Matrix u1;
  Matrix u2;
  Matrix a;

  double c13() const { return a(0, 2); }
  double c14() const { return a(0, 3); }
  double c23() const { return a(1, 2); }
  double c24() const { return a(1, 3); }

  void rotate_block1(const Matrix& r) {
    const Matrix full = block_diag(r, Matrix::identity(2));
    a = full.transpose() * a * full;
    u1 = u1 * r;
  }
  void rotate_block2(const Matrix& r) {
    const Matrix full = block_diag(Matrix::identity(2), r);
    a = full.transpose() * a * full;
    u2 = u2 * r;
  }
};

void require_2x2(const BlockMatrix& a, const char* what) {
  if (!a.is_2x2_blocks()) {
    std::ostringstream os;
    os << what << " requires 2 + 2 blocks, got " << a.n1() << " + " << a.n2();
    throw ShapeError(os.str());
  }
}

Frame frame_of(const BlockMatrix& a) {
  BlockDiagonalization bd = block_diagonalize(a);
  return {bd.w.u1(), bd.w.u2(), bd.rotated.full().matrix()};
}

// Inside a tie band the block rotation is free; use it to zero a23.
bool resolve_ties(Frame& f) {
  if (near_tie(f.a(2, 2), f.a(3, 3))) {
    const double r = std::hypot(f.c23(), f.c24());
    if (r > 0.0) f.rotate_block2(rotation(f.c24() / r, -f.c23() / r));
    return true;
  }
  if (near_tie(f.a(0, 0), f.a(1, 1))) {
    const double r = std::hypot(f.c13(), f.c23());
    if (r > 0.0) f.rotate_block1(rotation(f.c13() / r, f.c23() / r));
    return true;
  }
  return false;
}

struct SignQuantity {
  double value = 0.0;
  double v11 = 1.0;
  double v21 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double scale = 0.0;  // max |C|
  bool lambda_tie = false;

  bool holds() const { return value >= -kSignTol * scale * scale; }
};

// v11 c13 (v11 c13 + v21 c23), v the top eigenvector of C C^T.
SignQuantity sign_quantity(const Matrix& a) {
  const double c13 = a(0, 2), c14 = a(0, 3), c23 = a(1, 2), c24 = a(1, 3);
  SignQuantity q;
  q.scale = std::max({std::abs(c13), std::abs(c14), std::abs(c23), std::abs(c24)});
  const EigenPair2 e = eigen2(c13 * c13 + c14 * c14, c13 * c23 + c14 * c24, c23 * c23 + c24 * c24);
  q.lambda1 = e.lambda1;
  q.lambda2 = e.lambda2;
  if (e.lambda1 - e.lambda2 <= kTieTol * std::abs(e.lambda1)) {
    q.lambda_tie = true;
  } else {
    q.v11 = e.v1[0];
    q.v21 = e.v1[1];
  }
  q.value = q.v11 * c13 * (q.v11 * c13 + q.v21 * c23);
  return q;
}

// Orthogonal (U1, U2) with diag(U1, U2)^T a diag(U1, U2) entrywise >= 0, for a
// frame matrix a (diagonal blocks with sorted diagonals) satisfying the sign
// inequality.
std::pair<Matrix, Matrix> nonneg_in_frame(const Matrix& a) {
  const std::array<std::array<double, 2>, 2> c{{{a(0, 2), a(0, 3)}, {a(1, 2), a(1, 3)}}};
  double scale = 0.0;
  for (const auto& row : c)
    for (double x : row) scale = std::max(scale, std::abs(x));
  const double ztol = kZeroTol * std::max(scale, 1.0);

  auto sign = [](unsigned mask, unsigned bit) { return (mask >> bit) & 1U ? -1.0 : 1.0; };
  auto flipped = [&](unsigned mask, int i, int j) {
    return sign(mask, i) * sign(mask, 2 + j) * c[i][j];
  };
  auto flips = [&](unsigned mask) {
    return std::pair{Matrix::diagonal({sign(mask, 0), sign(mask, 1)}),
                     Matrix::diagonal({sign(mask, 2), sign(mask, 3)})};
  };

  for (unsigned mask = 0; mask < 16; ++mask) {
    bool ok = true;
    for (int i = 0; i < 2 && ok; ++i)
      for (int j = 0; j < 2 && ok; ++j) ok = flipped(mask, i, j) >= -ztol;
    if (ok) return flips(mask);
  }

  // All entries are nonzero and no flip works: reduce to [[a13, a14], [a23, -a24]].
  unsigned chosen = 16;
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (flipped(mask, 0, 0) > ztol && flipped(mask, 0, 1) > ztol && flipped(mask, 1, 0) > ztol &&
        flipped(mask, 1, 1) < -ztol) {
      chosen = mask;
      break;
    }
  }
  if (chosen == 16) throw InternalError("sign-flip reduction found no admissible pattern");
  const auto [d1, d2] = flips(chosen);
  const double a13 = flipped(chosen, 0, 0);
  const double a14 = flipped(chosen, 0, 1);
  const double a23 = flipped(chosen, 1, 0);
  const double a24 = -flipped(chosen, 1, 1);

  if (a13 * a23 - a14 * a24 >= 0.0) {
    const double x = a14 * a24 / a23;
    const double alpha = 1.0 / std::hypot(x, a14);
    const double beta = 1.0 / std::hypot(a23, a24);
    const Matrix u2{{alpha * x, beta * a23}, {alpha * a14, -beta * a24}};
    return {d1, d2 * u2};
  }

  const Matrix f{{a13, a14}, {a23, -a24}};
  const Matrix ff = f * f.transpose();
  const EigenPair2 e = eigen2(ff(0, 0), ff(0, 1), ff(1, 1));
  std::array<double, 2> v2 = e.v2;
  if (v2[0] < 0.0 || (v2[0] == 0.0 && v2[1] < 0.0)) v2 = {-v2[0], -v2[1]};
  const Matrix v{{e.v1[0], v2[0]}, {e.v1[1], v2[1]}};
  if (e.lambda2 <= 0.0) throw InternalError("singular off-diagonal block in the singular-vector case");
  const Matrix w = f.transpose() * v *
                   Matrix::diagonal({1.0 / std::sqrt(e.lambda1), 1.0 / std::sqrt(e.lambda2)});
  return {d1 * v, d2 * w};
}

SignatureMatrix finish_witness(const Matrix& u1, const Matrix& u2) {
  return SignatureMatrix(polar_step(u1), polar_step(u2));
}

struct OffdiagAnalysis {
  SignQuantity quantity;
  bool tie_forced = false;
  std::optional<SignatureMatrix> witness;
};

// Swap the coordinates of each block, solve the entrywise problem on the
// result, and undo the swap with a sign change on U1.
OffdiagAnalysis analyze_offdiag(const BlockMatrix& a) {
  require_2x2(a, "non-positive off-diagonal signature");
  const Frame f = frame_of(a);
  const Matrix p1{{0.0, 1.0}, {1.0, 0.0}};

  Matrix swapped = f.a;
  const Matrix c{{f.c13(), f.c14()}, {f.c23(), f.c24()}};
  swapped.set_block(0, 2, p1 * c * p1);
  swapped.set_block(2, 0, (p1 * c * p1).transpose());

  Frame g{Matrix::identity(2), Matrix::identity(2), swapped};
  OffdiagAnalysis out;
  out.tie_forced = resolve_ties(g);
  out.quantity = sign_quantity(g.a);
  if (!out.quantity.holds()) return out;

  const auto [t1, t2] = nonneg_in_frame(g.a);
  const Matrix ut1 = g.u1 * t1;
  const Matrix ut2 = g.u2 * t2;
  const SignatureMatrix u = finish_witness(-1.0 * (f.u1 * p1 * ut1), f.u2 * p1 * ut2);

  const Matrix conj = u.conjugate(a.full().matrix());
  const double tol = kWitnessTol * std::max(1.0, a.full().matrix().max_abs());
  if (conj.max_abs_off_diagonal() > 0.0) {
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j && conj(i, j) > tol)
          throw InternalError("non-positive off-diagonal witness failed verification");
  }
  out.witness = u;
  return out;
}

CriterionReport signature_report(const BlockMatrix& a, Criterion criterion) {
  require_2x2(a, to_string(criterion).data());
  Frame f = frame_of(a);
  const bool tie = resolve_ties(f);
  const SignQuantity q = sign_quantity(f.a);

  CriterionReport r;
  r.criterion = criterion;
  r.holds = q.holds();
  r.detail["quantity"] = q.value;
  r.detail["v11"] = q.v11;
  r.detail["v21"] = q.v21;
  r.detail["a13"] = f.c13();
  r.detail["a23"] = f.c23();
  r.detail["lambda1"] = q.lambda1;
  r.detail["lambda2"] = q.lambda2;
  r.detail["tie_rule_applied"] = tie || q.lambda_tie ? 1.0 : 0.0;
  if (!r.holds) return r;

  const auto [t1, t2] = nonneg_in_frame(f.a);
  const SignatureMatrix u = finish_witness(f.u1 * t1, f.u2 * t2);
  const Matrix conj = u.conjugate(a.full().matrix());
  const double tol = kWitnessTol * std::max(1.0, a.full().matrix().max_abs());
  r.detail["witness_min_entry"] = conj.min_entry();
  if (conj.min_entry() < -tol) throw InternalError("non-negative signature witness failed verification");
  r.witness = u;
  return r;
}

}  // namespace

SignatureMatrix::SignatureMatrix(Matrix u1, Matrix u2) : u1_(std::move(u1)), u2_(std::move(u2)) {
  if (u1_.rows() != u1_.cols() || u2_.rows() != u2_.cols())
    throw InvalidArgument("signature blocks must be square");
  if (orthogonality_error() > kOrthogonalityTol)
    throw InvalidArgument("signature blocks must be orthogonal");
}

SignatureMatrix SignatureMatrix::identity(std::size_t n1, std::size_t n2) {
  return {Matrix::identity(n1), Matrix::identity(n2)};
}

Matrix SignatureMatrix::conjugate(const Matrix& a) const {
  if (a.rows() != n1() + n2() || a.cols() != n1() + n2())
    throw ShapeError("conjugate: dimension mismatch");
  const Matrix u = full();
  return u.transpose() * a * u;
}

BlockMatrix SignatureMatrix::conjugate(const BlockMatrix& a) const {
  if (a.n1() != n1() || a.n2() != n2()) throw ShapeError("conjugate: block mismatch");
  return {SymMatrix(conjugate(a.full().matrix())), n1()};
}

double SignatureMatrix::orthogonality_error() const {
  return std::max(orthogonality_error_of(u1_), orthogonality_error_of(u2_));
}

SignatureMatrix SignatureMatrix::reorthonormalized() const {
  return {polar_step(u1_), polar_step(u2_)};
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::GriffithsBapat: return "griffiths_bapat";
    case Criterion::Shanbhag: return "shanbhag";
    case Criterion::WordTraceSign: return "word_trace_sign";
    case Criterion::InverseCovarianceSign: return "inverse_covariance_sign";
    case Criterion::NonnegativeSignature: return "nonnegative_signature";
  }
  return "unknown";
}

BlockDiagonalization block_diagonalize(const BlockMatrix& a) {
  if (!is_positive_definite(a.full())) throw NotPositiveDefinite("block_diagonalize: matrix is not positive definite");
  const SymEigen e1 = eigen_sym(SymMatrix(a.b11()));
  const SymEigen e2 = eigen_sym(SymMatrix(a.b22()));
  SignatureMatrix w(e1.vectors, e2.vectors);
  BlockMatrix rotated = w.conjugate(a);
  return {std::move(w), std::move(rotated)};
}

CriterionReport nonnegative_signature_check(const BlockMatrix& a) {
  return signature_report(a, Criterion::NonnegativeSignature);
}

SignatureMatrix construct_nonneg_signature(const BlockMatrix& a) {
  CriterionReport r = nonnegative_signature_check(a);
  if (!r.holds) throw PreconditionViolated("sign inequality fails; no non-negative signature witness");
  return *r.witness;
}

CriterionReport word_trace_condition(const BlockMatrix& q) {
  return signature_report(q, Criterion::WordTraceSign);
}

std::optional<SignatureMatrix> construct_nonpositive_offdiag_signature(const BlockMatrix& a) {
  return analyze_offdiag(a).witness;
}

double nonpositive_offdiag_quantity(const BlockMatrix& a) {
  return analyze_offdiag(a).quantity.value;
}

CriterionReport precision_signature_check(const CovarianceModel& model) {
  if (model.n1() != 2 || model.n2() != 2)
    throw ShapeError("inverse covariance sign check requires 2 + 2 blocks");
  const BlockMatrix p = invert_blocks(model);
  const OffdiagAnalysis an = analyze_offdiag(p);
  CriterionReport r;
  r.criterion = Criterion::InverseCovarianceSign;
  r.holds = an.quantity.holds();
  r.witness = an.witness;
  r.detail["quantity"] = an.quantity.value;
  r.detail["v11"] = an.quantity.v11;
  r.detail["v21"] = an.quantity.v21;
  r.detail["tie_rule_applied"] = an.tie_forced || an.quantity.lambda_tie ? 1.0 : 0.0;
  r.detail["witness_exists"] = an.witness ? 1.0 : 0.0;
  return r;
}

CriterionReport griffiths_bapat_check(const SymMatrix& sigma) {
  const std::size_t n = sigma.dim();
  if (n == 0) throw ShapeError("griffiths_bapat_check: empty matrix");
  if (n > 20) throw CapExceeded("griffiths_bapat_check: sign search is capped at n = 20");
  const SymMatrix p = inverse_spd(sigma);
  const double tol = kSignTol * p.matrix().max_abs();

  CriterionReport r;
  r.criterion = Criterion::GriffithsBapat;
  const std::uint32_t count = std::uint32_t{1} << (n - 1);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    // bit i - 1 of mask flips coordinate i (coordinate 0 is fixed to +1)
    auto s = [mask](std::size_t i) { return i > 0 && ((mask >> (i - 1)) & 1U) ? -1.0 : 1.0; };
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j) ok = s(i) * s(j) * p(i, j) <= tol;
    if (ok) {
      r.holds = true;
      r.signs.resize(n);
      for (std::size_t i = 0; i < n; ++i) r.signs[i] = static_cast<int>(s(i));
      r.detail["sign_index"] = static_cast<double>(mask);
      break;
    }
  }
  r.detail["candidates"] = static_cast<double>(count);
  return r;
}

CriterionReport shanbhag_check(const CovarianceModel& model, unsigned max_power) {
  if (model.n1() != 1) throw ShapeError("shanbhag_check requires n1 == 1");
  const BlockMatrix q = build_q(model);
  const Matrix q12 = q.b12();
  const Matrix q22 = q.b22();

  Matrix w = q12.transpose();
  double min_term = std::numeric_limits<double>::infinity();
  for (unsigned p = 0; p <= max_power; ++p) {
    const double term = (q12 * w)(0, 0);
    min_term = std::min(min_term, term);
    w = q22 * w;
  }

  CriterionReport r;
  r.criterion = Criterion::Shanbhag;
  r.holds = true;
  r.detail["q11"] = q.full()(0, 0);
  r.detail["min_term"] = min_term;
  r.detail["max_power"] = max_power;
  r.detail["terms_nonnegative"] = q.full()(0, 0) > 0.0 && min_term >= -1e-12 ? 1.0 : 0.0;
  return r;
}

double normalized_limiting_word(const BlockMatrix& a, unsigned K) {
  const Matrix a11 = a.b11(), a12 = a.b12(), a21 = a.b21(), a22 = a.b22();
  const Matrix c = a12 * a21;
  const double top1 = largest_eigenvalue(SymMatrix(a11));
  const double top2 = largest_eigenvalue(SymMatrix(a22));
  const double lambda = largest_eigenvalue(SymMatrix(c));
  if (!(top1 > 0.0) || !(top2 > 0.0) || !(lambda > 0.0))
    throw DegenerateInput("normalized_limiting_word: a normalizing eigenvalue is not positive");
  const Matrix word = power((1.0 / top1) * a11, K) * a12 * power((1.0 / top2) * a22, K) * a21 *
                      power((1.0 / lambda) * c, K);
  return word.trace();
}

std::optional<LimitingWordHit> limiting_word_search(const BlockMatrix& a, unsigned max_K) {
  require_2x2(a, "limiting_word_search");
  const Frame f = frame_of(a);
  const Matrix c{{f.c13(), f.c14()}, {f.c23(), f.c24()}};
  const Matrix cct = c * c.transpose();
  const EigenPair2 e = eigen2(cct(0, 0), cct(0, 1), cct(1, 1));
  if (!(e.lambda1 > 0.0)) return std::nullopt;
  const Matrix v{{e.v1[0], e.v2[0]}, {e.v1[1], e.v2[1]}};
  const double r1 = f.a(1, 1) / f.a(0, 0);
  const double r2 = f.a(3, 3) / f.a(2, 2);
  const double r3 = e.lambda2 / e.lambda1;

  unsigned run = 0;
  LimitingWordHit first;
  for (unsigned K = 1; K <= max_K; ++K) {
    const Matrix d1 = Matrix::diagonal({1.0, std::pow(r1, K)});
    const Matrix d2 = Matrix::diagonal({1.0, std::pow(r2, K)});
    const Matrix ev = v * Matrix::diagonal({1.0, std::pow(r3, K)}) * v.transpose();
    const double t = (d1 * c * d2 * c.transpose() * ev).trace();
    if (t < 0.0) {
      if (run == 0) first = {K, t};
      if (++run == 3) return first;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

}  // namespace idsq
