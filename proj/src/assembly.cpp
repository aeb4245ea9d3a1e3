#include <algorithm>
#include <thread>

#include "cartfe/errors.hpp"
#include "cartfe/operators.hpp"
#include "cartfe/simd/kernels.hpp"

namespace cartfe {

namespace {

using detail::Node;
using detail::NodeKind;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Term make_term(TermKind kind, Measure m) { return Term{kind, std::move(m), {}, {}, {}, {}}; }

ElementLayout make_layout(const MultiFieldSpace& s, int nsides) {
  ElementLayout l;
  l.num_sides = nsides;
  l.num_fields = s.num_fields();
  for (int side = 0; side < nsides; ++side)
    for (int f = 0; f < s.num_fields(); ++f) {
      l.offsets.push_back(l.total);
      l.counts.push_back(s.space(f)->dofs_per_cell());
      l.total += l.counts.back();
    }
  return l;
}

bool same_model(const ModelPtr& a, const ModelPtr& b) { return a == b || *a == *b; }

void check_models(const MultiFieldSpace* trial, const MultiFieldSpace& test, const Measure& m) {
  const auto& mm = m.domain()->model();
  for (int f = 0; f < test.num_fields(); ++f)
    CARTFE_THROW_IF(!same_model(test.space(f)->model(), mm), DomainError,
                    "test space and integration domain use different models");
  if (trial)
    for (int f = 0; f < trial->num_fields(); ++f)
      CARTFE_THROW_IF(!same_model(trial->space(f)->model(), mm), DomainError,
                      "trial space and integration domain use different models");
}

// Global indices of one element's dofs. idx >= 0: free row/column; idx < 0:
// constrained, with `value` holding its Dirichlet value.
struct ElementDofs {
  std::vector<int> idx;
  std::vector<double> value;
};

// raw=true numbers constrained dofs after all free ones instead of marking them.
void element_dofs(const MultiFieldSpace& s, const Triangulation& dom, int item, bool raw, ElementDofs& out) {
  out.idx.clear();
  out.value.clear();
  int coff = s.num_free();
  std::vector<int> con_offsets;
  for (int f = 0; f < s.num_fields(); ++f) {
    con_offsets.push_back(coff);
    coff += s.space(f)->num_constrained();
  }
  for (int side = 0; side < dom.num_sides(); ++side) {
    const int cell = dom.cell(item, side);
    for (int f = 0; f < s.num_fields(); ++f) {
      const auto dofs = s.space(f)->cell_dofs(cell);
      const auto g = s.field(f).dirichlet_values();
      for (int d : dofs) {
        if (d >= 0) {
          out.idx.push_back(s.offset(f) + d);
          out.value.push_back(0.0);
        } else {
          const int k = -d - 1;
          out.idx.push_back(raw ? con_offsets[sz(f)] + k : -1);
          out.value.push_back(g[sz(k)]);
        }
      }
    }
  }
}

bool gram_compatible(const Node& n, const Node& a, const Node& b, const FieldBlock& A, const FieldBlock& B) {
  (void)a;
  (void)b;
  if (!(A.shape() == B.shape())) return false;
  if (n.kind() == NodeKind::Inner) return true;
  return A.shape().kind == ValueKind::Scalar || A.shape().kind == ValueKind::Vector;
}

struct ItemData {
  const EvalContext* ctx;
  std::span<const double> w;
  std::vector<double>* wexp;
};

// K[i][j] += coef * integral of the node, distributing over linear structure
// and sending test/trial products through the gram kernel.
void element_matrix(const Node& n, double coef, const ItemData& d, double* K, int ldo) {
  switch (n.kind()) {
    case NodeKind::Add:
      element_matrix(*n.child(0), coef, d, K, ldo);
      element_matrix(*n.child(1), coef, d, K, ldo);
      return;
    case NodeKind::Sub:
      element_matrix(*n.child(0), coef, d, K, ldo);
      element_matrix(*n.child(1), -coef, d, K, ldo);
      return;
    case NodeKind::Neg:
      element_matrix(*n.child(0), -coef, d, K, ldo);
      return;
    case NodeKind::Mul:
    case NodeKind::Inner: {
      const Node& a = *n.child(0);
      const Node& b = *n.child(1);
      if (n.kind() == NodeKind::Mul) {
        if (const auto c = a.scalar_constant()) return element_matrix(b, coef * *c, d, K, ldo);
        if (const auto c = b.scalar_constant()) return element_matrix(a, coef * *c, d, K, ldo);
      }
      const bool a_test = a.test && !a.trial, a_trial = a.trial && !a.test;
      const bool b_test = b.test && !b.trial, b_trial = b.trial && !b.test;
      if ((a_test && b_trial) || (a_trial && b_test)) {
        const Node& tn = a_test ? a : b;
        const Node& rn = a_test ? b : a;
        FieldBlock T = tn.eval(*d.ctx);
        FieldBlock R = rn.eval(*d.ctx);
        if (gram_compatible(n, tn, rn, T, R)) {
          const int nc = T.ncomp(), npts = T.npts();
          auto& wexp = *d.wexp;
          wexp.resize(sz(npts * nc));
          for (int q = 0; q < npts; ++q)
            for (int c = 0; c < nc; ++c) wexp[sz(q * nc + c)] = coef * d.w[sz(q)];
          const std::size_t m = T.stride();
          simd::weighted_gram(std::span<const double>(T.data(), T.size()), sz(T.test().count),
                              std::span<const double>(R.data(), R.size()), sz(R.trial().count), wexp, m,
                              std::span<double>(K + sz(T.test().offset) * sz(ldo) + sz(R.trial().offset),
                                                (sz(T.test().count) - 1) * sz(ldo) + sz(R.trial().count)),
                              sz(ldo));
          return;
        }
      }
      break;
    }
    default:
      break;
  }
  CARTFE_THROW_IF(!n.test || !n.trial, ArityError, "bilinear integrand term lacks a test or trial factor");
  FieldBlock B = n.eval(*d.ctx);
  CARTFE_THROW_IF(B.shape().kind != ValueKind::Scalar, KindError,
                  std::string("bilinear integrand must be scalar, got a ") + kind_name(B.shape().kind));
  const auto& rt = B.test();
  const auto& rr = B.trial();
  for (int i = 0; i < rt.count; ++i)
    for (int j = 0; j < rr.count; ++j) {
      double s = 0.0;
      const double* v = B.at(i, j, 0);
      for (int q = 0; q < B.npts(); ++q) s += d.w[sz(q)] * v[q];
      K[sz(rt.offset + i) * sz(ldo) + sz(rr.offset + j)] += coef * s;
    }
}

void element_vector(const Node& n, double coef, const ItemData& d, double* F) {
  switch (n.kind()) {
    case NodeKind::Add:
      element_vector(*n.child(0), coef, d, F);
      element_vector(*n.child(1), coef, d, F);
      return;
    case NodeKind::Sub:
      element_vector(*n.child(0), coef, d, F);
      element_vector(*n.child(1), -coef, d, F);
      return;
    case NodeKind::Neg:
      element_vector(*n.child(0), -coef, d, F);
      return;
    case NodeKind::Mul:
      if (const auto c = n.child(0)->scalar_constant()) return element_vector(*n.child(1), coef * *c, d, F);
      if (const auto c = n.child(1)->scalar_constant()) return element_vector(*n.child(0), coef * *c, d, F);
      break;
    default:
      break;
  }
  CARTFE_THROW_IF(!n.test || n.trial, ArityError, "linear integrand term must depend on the test field only");
  FieldBlock B = n.eval(*d.ctx);
  CARTFE_THROW_IF(B.shape().kind != ValueKind::Scalar, KindError,
                  std::string("linear integrand must be scalar, got a ") + kind_name(B.shape().kind));
  const auto& rt = B.test();
  for (int i = 0; i < rt.count; ++i) {
    double s = 0.0;
    const double* v = B.at(i, 0, 0);
    for (int q = 0; q < B.npts(); ++q) s += d.w[sz(q)] * v[q];
    F[rt.offset + i] += coef * s;
  }
}

struct Job {
  const Measure* m;
  const MultiFieldSpace* trial;  // null: vector only
  const MultiFieldSpace* test;
  const CellField* matrix_integrand;  // may be null
  const CellField* vector_integrand;  // may be null
  bool lift = false;                  // fold constrained columns into the rhs
  bool raw = false;
};

struct Partial {
  CooBuilder A;
  std::vector<double> b;
};

void run_items(const Job& job, int begin, int end, Partial& out) {
  const Triangulation& dom = *job.m->domain();
  const ElementLayout tl = make_layout(*job.test, dom.num_sides());
  const ElementLayout rl = job.trial ? make_layout(*job.trial, dom.num_sides()) : ElementLayout{};
  Workspace ws;
  std::vector<double> w, wexp, K, F;
  ElementDofs rows, cols;
  for (int item = begin; item < end; ++item) {
    const EvalContext ctx = make_context(*job.m, item, ws, &tl, job.trial ? &rl : nullptr);
    item_weights(*job.m, item, w);
    const ItemData d{&ctx, w, &wexp};
    element_dofs(*job.test, dom, item, job.raw, rows);
    if (job.matrix_integrand) {
      detail::check_domain(job.matrix_integrand->node(), ctx);
      element_dofs(*job.trial, dom, item, job.raw, cols);
      K.assign(sz(tl.total) * sz(rl.total), 0.0);
      element_matrix(job.matrix_integrand->node(), 1.0, d, K.data(), rl.total);
      for (int i = 0; i < tl.total; ++i) {
        const int r = rows.idx[sz(i)];
        if (r < 0) continue;
        for (int j = 0; j < rl.total; ++j) {
          const double k = K[sz(i) * sz(rl.total) + sz(j)];
          if (k == 0.0) continue;
          const int c = cols.idx[sz(j)];
          if (c >= 0) {
            out.A.add(r, c, k);
          } else if (job.lift) {
            out.b[sz(r)] -= k * cols.value[sz(j)];
          }
        }
      }
    }
    if (job.vector_integrand) {
      detail::check_domain(job.vector_integrand->node(), ctx);
      F.assign(sz(tl.total), 0.0);
      element_vector(job.vector_integrand->node(), 1.0, d, F.data());
      for (int i = 0; i < tl.total; ++i)
        if (rows.idx[sz(i)] >= 0) out.b[sz(rows.idx[sz(i)])] += F[sz(i)];
    }
  }
}

void run_job(const Job& job, int threads, int nrows, int ncols, CooBuilder& A, std::vector<double>& b) {
  check_models(job.trial, *job.test, *job.m);
  const int n = job.m->domain()->num_items();
  const int nt = std::clamp(threads, 1, std::max(1, n));
  if (nt == 1) {
    Partial p{CooBuilder(nrows, ncols), std::vector<double>(sz(nrows), 0.0)};
    run_items(job, 0, n, p);
    A.append(p.A);
    for (int i = 0; i < nrows; ++i) b[sz(i)] += p.b[sz(i)];
    return;
  }
  std::vector<Partial> parts;
  for (int t = 0; t < nt; ++t) parts.push_back(Partial{CooBuilder(nrows, ncols), std::vector<double>(sz(nrows), 0.0)});
  std::vector<std::exception_ptr> errors(sz(nt));
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) {
    const int lo = static_cast<int>(static_cast<long>(n) * t / nt);
    const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / nt);
    pool.emplace_back([&, t, lo, hi] {
      try {
        run_items(job, lo, hi, parts[sz(t)]);
      } catch (...) {
        errors[sz(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& p : parts) {
    A.append(p.A);
    for (int i = 0; i < nrows; ++i) b[sz(i)] += p.b[sz(i)];
  }
}

void check_rhs_domain(const Measure& m) {
  CARTFE_THROW_IF(m.domain()->kind() == DomainKind::Skeleton, UnsupportedDomainError,
                  "right-hand-side integrands on the skeleton are not supported");
}

}  // namespace

Term affine_term(BilinearFn a, LinearFn b, Measure m) {
  CARTFE_THROW_IF(!a || !b, InvalidArgument, "affine term needs both integrands");
  check_rhs_domain(m);
  Term t = make_term(TermKind::Affine, std::move(m));
  t.a = std::move(a);
  t.b = std::move(b);
  return t;
}

Term linear_term(BilinearFn a, Measure m) {
  CARTFE_THROW_IF(!a, InvalidArgument, "linear term needs an integrand");
  Term t = make_term(TermKind::Linear, std::move(m));
  t.a = std::move(a);
  return t;
}

Term source_term(LinearFn b, Measure m) {
  CARTFE_THROW_IF(!b, InvalidArgument, "source term needs an integrand");
  check_rhs_domain(m);
  Term t = make_term(TermKind::Source, std::move(m));
  t.b = std::move(b);
  return t;
}

Term nonlinear_term(ResidualFn res, JacobianFn jac, Measure m) {
  CARTFE_THROW_IF(!res || !jac, InvalidArgument, "nonlinear term needs residual and jacobian integrands");
  Term t = make_term(TermKind::Nonlinear, std::move(m));
  t.res = std::move(res);
  t.jac = std::move(jac);
  return t;
}

AffineOperator assemble_affine(const MultiFieldSpace& trial, const MultiFieldSpace& test,
                               const std::vector<Term>& terms, AssemblyOptions options) {
  const int nr = test.num_free(), nc = trial.num_free();
  CooBuilder A(nr, nc);
  std::vector<double> b(sz(nr), 0.0);
  const Fields u = basis_fields(BasisRole::Trial, trial);
  const Fields v = basis_fields(BasisRole::Test, test);
  for (const auto& t : terms) {
    CARTFE_THROW_IF(t.kind == TermKind::Nonlinear, InvalidArgument, "nonlinear term in an affine problem");
    std::optional<CellField> ai, bi;
    if (t.a) ai = t.a(u, v);
    if (t.b) bi = t.b(v);
    Job job{&t.measure, &trial, &test, ai ? &*ai : nullptr, bi ? &*bi : nullptr, true, false};
    run_job(job, options.threads, nr, nc, A, b);
  }
  return AffineOperator(trial, test, A.finalize(), std::move(b));
}

CsrMatrix assemble_raw_matrix(const MultiFieldSpace& trial, const MultiFieldSpace& test, const BilinearFn& a,
                              const Measure& m) {
  auto total = [](const MultiFieldSpace& s) {
    int n = s.num_free();
    for (int f = 0; f < s.num_fields(); ++f) n += s.space(f)->num_constrained();
    return n;
  };
  const int nr = total(test), nc = total(trial);
  CooBuilder A(nr, nc);
  std::vector<double> b(sz(nr), 0.0);
  const CellField ai = a(basis_fields(BasisRole::Trial, trial), basis_fields(BasisRole::Test, test));
  Job job{&m, &trial, &test, &ai, nullptr, false, true};
  run_job(job, 1, nr, nc, A, b);
  return A.finalize();
}

NonlinearOperator::NonlinearOperator(MultiFieldSpace trial, MultiFieldSpace test, std::vector<Term> terms,
                                     AssemblyOptions options)
    : trial_(std::move(trial)), test_(std::move(test)), terms_(std::move(terms)), options_(options) {
  for (const auto& t : terms_)
    CARTFE_THROW_IF(t.kind != TermKind::Nonlinear, InvalidArgument, "nonlinear operators take nonlinear terms only");
}

std::vector<double> NonlinearOperator::residual(std::span<const double> x) const {
  const Fields uh = fe_fields(unpack(trial_, x));
  const Fields v = basis_fields(BasisRole::Test, test_);
  const int nr = test_.num_free();
  CooBuilder unused(nr, trial_.num_free());
  std::vector<double> r(sz(nr), 0.0);
  for (const auto& t : terms_) {
    CARTFE_THROW_IF(t.measure.domain()->kind() == DomainKind::Skeleton, UnsupportedDomainError,
                    "nonlinear skeleton terms are not supported");
    const CellField ri = t.res(uh, v);
    Job job{&t.measure, nullptr, &test_, nullptr, &ri, false, false};
    run_job(job, options_.threads, nr, trial_.num_free(), unused, r);
  }
  return r;
}

CsrMatrix NonlinearOperator::jacobian(std::span<const double> x) const {
  const Fields uh = fe_fields(unpack(trial_, x));
  const Fields du = basis_fields(BasisRole::Trial, trial_);
  const Fields v = basis_fields(BasisRole::Test, test_);
  const int nr = test_.num_free(), nc = trial_.num_free();
  CooBuilder A(nr, nc);
  std::vector<double> unused(sz(nr), 0.0);
  for (const auto& t : terms_) {
    const CellField ji = t.jac(uh, du, v);
    Job job{&t.measure, &trial_, &test_, &ji, nullptr, false, false};
    run_job(job, options_.threads, nr, nc, A, unused);
  }
  return A.finalize();
}

}  // namespace cartfe
