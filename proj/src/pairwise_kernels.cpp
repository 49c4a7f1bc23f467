#include "pairkern/pairwise_kernels.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace pairkern {

std::string_view to_string(PairwiseKernel kernel) noexcept {
    switch (kernel) {
        case PairwiseKernel::linear:
            return "linear";
        case PairwiseKernel::poly2d:
            return "poly2d";
        case PairwiseKernel::kronecker:
            return "kronecker";
        case PairwiseKernel::cartesian:
            return "cartesian";
        case PairwiseKernel::symmetric:
            return "symmetric";
        case PairwiseKernel::anti_symmetric:
            return "antisymmetric";
        case PairwiseKernel::ranking:
            return "ranking";
        case PairwiseKernel::mlpk:
            return "mlpk";
    }
    return "unknown";
}

std::optional<PairwiseKernel> parse_pairwise_kernel(std::string_view name) noexcept {
    for (const auto kernel : all_pairwise_kernels) {
        if (name == to_string(kernel)) {
            return kernel;
        }
    }
    return std::nullopt;
}

bool requires_homogeneous(PairwiseKernel kernel) noexcept {
    switch (kernel) {
        case PairwiseKernel::symmetric:
        case PairwiseKernel::anti_symmetric:
        case PairwiseKernel::ranking:
        case PairwiseKernel::mlpk:
            return true;
        default:
            return false;
    }
}

namespace {

constexpr auto F = ElementSelector::first;
constexpr auto S = ElementSelector::second;

KernelTerm term(double coefficient, FactorKind left, FactorKind right, ElementSelector row_left, ElementSelector row_right, ElementSelector col_left, ElementSelector col_right) {
    return { coefficient, left, right, row_left, row_right, col_left, col_right };
}

// Left multiplication by P or Q rewrites the row selectors, right multiplication by
// P^T or Q^T the column selectors: R(d,t)P = R(t,d) and R(d,t)Q = R(d,d).
std::vector<KernelTerm> terms_of(PairwiseKernel kernel) {
    using enum FactorKind;
    switch (kernel) {
        case PairwiseKernel::kronecker:
            // D ⊗ T
            return { term(1, drug, target, F, S, F, S) };
        case PairwiseKernel::linear:
            // D ⊗ 1 + 1 ⊗ T
            return { term(1, drug, ones, F, S, F, S), term(1, ones, target, F, S, F, S) };
        case PairwiseKernel::poly2d:
            // Q(D ⊗ D)Q^T + 2 D ⊗ T + PQ(T ⊗ T)Q^T P
            return { term(1, drug, drug, F, F, F, F), term(2, drug, target, F, S, F, S), term(1, target, target, S, S, S, S) };
        case PairwiseKernel::cartesian:
            // D ⊗ I + I ⊗ T
            return { term(1, drug, identity, F, S, F, S), term(1, identity, target, F, S, F, S) };
        case PairwiseKernel::symmetric:
            // (I + P)(D ⊗ D)
            return { term(1, drug, drug, F, S, F, S), term(1, drug, drug, S, F, F, S) };
        case PairwiseKernel::anti_symmetric:
            // (I - P)(D ⊗ D)
            return { term(1, drug, drug, F, S, F, S), term(-1, drug, drug, S, F, F, S) };
        case PairwiseKernel::ranking:
            // (I - P)(D ⊗ 1)(I - P)
            return {
                term(1, drug, ones, F, S, F, S),
                term(-1, drug, ones, S, F, F, S),
                term(-1, drug, ones, F, S, S, F),
                term(1, drug, ones, S, F, S, F),
            };
        case PairwiseKernel::mlpk:
            // (I + P)(I - Q)(D ⊗ D)(I - Q)^T(I + P), expanded. With a = D[d,e], b = D[d,e'],
            // c = D[d',e], g = D[d',e'] the kernel is (a - b - c + g)^2.
            return {
                term(1, drug, drug, F, F, F, F),   // a^2
                term(1, drug, drug, S, S, F, F),   // c^2
                term(1, drug, drug, F, F, S, S),   // b^2
                term(1, drug, drug, S, S, S, S),   // g^2
                term(2, drug, drug, F, S, F, S),   // 2ag
                term(2, drug, drug, S, F, F, S),   // 2bc
                term(-2, drug, drug, F, F, F, S),  // -2ab
                term(-2, drug, drug, F, S, F, F),  // -2ac
                term(-2, drug, drug, F, S, S, S),  // -2bg
                term(-2, drug, drug, S, S, F, S),  // -2cg
            };
    }
    throw std::invalid_argument("decompose: unknown pairwise kernel");
}

}  // namespace

PairwiseKernelSpec decompose(PairwiseKernel kernel) {
    return { kernel, terms_of(kernel), requires_homogeneous(kernel) };
}

PairwiseKernelSpec decompose(std::string_view name) {
    const auto kernel = parse_pairwise_kernel(name);
    if (!kernel) {
        throw std::invalid_argument("unknown pairwise kernel '" + std::string(name) + "'");
    }
    return decompose(*kernel);
}

namespace {

void check_bounds(std::span<const index_type> ids, std::size_t bound, const char *what) {
    if (std::any_of(ids.begin(), ids.end(), [bound](index_type id) { return id >= bound; })) {
        throw std::invalid_argument(std::string(what) + " id out of base kernel bounds");
    }
}

const DenseMatrix &target_or_drug(const DenseMatrix &drug, const DenseMatrix *target) {
    return target != nullptr ? *target : drug;
}

}  // namespace

void check_kernel_inputs(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in) {
    if (spec.requires_homogeneous) {
        if (target != nullptr && target != &drug) {
            throw std::invalid_argument(std::string(to_string(spec.name)) + " kernel requires a shared object table (no separate target kernel)");
        }
        if (!out.homogeneous() || !in.homogeneous()) {
            throw std::invalid_argument(std::string(to_string(spec.name)) + " kernel requires homogeneous samples");
        }
    }
    if (!drug.is_square()) {
        throw std::invalid_argument("drug kernel must be square");
    }
    const DenseMatrix &t = target_or_drug(drug, target);
    if (!t.is_square()) {
        throw std::invalid_argument("target kernel must be square");
    }
    check_bounds(out.first_ids(), drug.rows(), "drug");
    check_bounds(in.first_ids(), drug.rows(), "drug");
    check_bounds(out.second_ids(), t.rows(), "target");
    check_bounds(in.second_ids(), t.rows(), "target");
}

PairwiseOperator::PairwiseOperator(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in) :
    rows_{ out.size() },
    cols_{ in.size() } {
    check_kernel_inputs(spec, drug, target, out, in);
    const DenseMatrix &target_kernel = target_or_drug(drug, target);

    // relabelings keyed by (sample side, selector); side 0 = out, 1 = in
    std::array<std::optional<CompactIds>, 4> relabeled;
    std::array<std::shared_ptr<const std::vector<index_type>>, 4> compact;
    auto ids_for = [&](int side, ElementSelector sel) -> const CompactIds & {
        const std::size_t key = static_cast<std::size_t>(side) * 2 + (sel == ElementSelector::first ? 0 : 1);
        if (!relabeled[key]) {
            const PairSample &sample = side == 0 ? out : in;
            relabeled[key] = relabel_compact(sel == ElementSelector::first ? sample.first_ids() : sample.second_ids());
            compact[key] = std::make_shared<const std::vector<index_type>>(relabeled[key]->compact);
        }
        return *relabeled[key];
    };
    auto compact_for = [&](int side, ElementSelector sel) {
        (void) ids_for(side, sel);
        return compact[static_cast<std::size_t>(side) * 2 + (sel == ElementSelector::first ? 0 : 1)];
    };

    std::map<std::tuple<FactorKind, ElementSelector, ElementSelector>, std::shared_ptr<const DenseMatrix>> blocks;
    auto block_for = [&](FactorKind kind, ElementSelector row_sel, ElementSelector col_sel) {
        auto &slot = blocks[{ kind, row_sel, col_sel }];
        if (!slot) {
            const auto &row_ids = ids_for(0, row_sel).unique;
            const auto &col_ids = ids_for(1, col_sel).unique;
            DenseMatrix block(row_ids.size(), col_ids.size());
            for (std::size_t r = 0; r < row_ids.size(); ++r) {
                for (std::size_t c = 0; c < col_ids.size(); ++c) {
                    switch (kind) {
                        case FactorKind::drug:
                            block(r, c) = drug(row_ids[r], col_ids[c]);
                            break;
                        case FactorKind::target:
                            block(r, c) = target_kernel(row_ids[r], col_ids[c]);
                            break;
                        case FactorKind::ones:
                            block(r, c) = 1.0;
                            break;
                        case FactorKind::identity:
                            block(r, c) = row_ids[r] == col_ids[c] ? 1.0 : 0.0;
                            break;
                    }
                }
            }
            slot = std::make_shared<const DenseMatrix>(std::move(block));
        }
        return slot;
    };

    terms_.reserve(spec.terms.size());
    for (const KernelTerm &t : spec.terms) {
        terms_.push_back({
            t.coefficient,
            block_for(t.left_factor, t.row_sel_left, t.col_sel_left),
            block_for(t.right_factor, t.row_sel_right, t.col_sel_right),
            compact_for(0, t.row_sel_left),
            compact_for(0, t.row_sel_right),
            compact_for(1, t.col_sel_left),
            compact_for(1, t.col_sel_right),
        });
    }
}

void PairwiseOperator::apply(std::span<const double> v, std::span<double> out, GvtStats *stats) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("PairwiseOperator: vector length " + std::to_string(v.size()) + " does not match input sample size " + std::to_string(cols_));
    }
    if (out.size() != rows_) {
        throw std::invalid_argument("PairwiseOperator: output length does not match output sample size");
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (const ResolvedTerm &t : terms_) {
        const GvtProblem problem{ *t.first_factor, *t.second_factor, *t.out_first, *t.out_second, *t.in_first, *t.in_second };
        const std::vector<double> part = gvt_matvec(problem, v, GvtVariant::automatic, stats);
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] += t.coefficient * part[i];
        }
    }
}

std::vector<double> PairwiseOperator::apply(std::span<const double> v, GvtStats *stats) const {
    std::vector<double> out(rows_);
    apply(v, out, stats);
    return out;
}

std::size_t PairwiseOperator::factor_bytes() const noexcept {
    std::vector<const DenseMatrix *> seen;
    std::size_t bytes = 0;
    for (const ResolvedTerm &t : terms_) {
        for (const DenseMatrix *m : { t.first_factor.get(), t.second_factor.get() }) {
            if (std::find(seen.begin(), seen.end(), m) == seen.end()) {
                seen.push_back(m);
                bytes += m->size() * sizeof(double);
            }
        }
    }
    return bytes;
}

std::vector<double> pairwise_matvec(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in, std::span<const double> v, GvtStats *stats) {
    return PairwiseOperator(spec, drug, target, out, in).apply(v, stats);
}

double kernel_value(PairwiseKernel kernel, const DenseMatrix &drug, const DenseMatrix *target, const Pair &a, const Pair &b) {
    if (requires_homogeneous(kernel) && target != nullptr && target != &drug) {
        throw std::invalid_argument(std::string(to_string(kernel)) + " kernel requires a shared object table (no separate target kernel)");
    }
    const DenseMatrix &t = target_or_drug(drug, target);
    const DenseMatrix &d = drug;
    // a = (d, t) or (d, d'), b = (d̄, t̄) or (d̄, d̄')
    switch (kernel) {
        case PairwiseKernel::linear:
            return d(a.first, b.first) + t(a.second, b.second);
        case PairwiseKernel::poly2d: {
            const double s = d(a.first, b.first) + t(a.second, b.second);
            return s * s;
        }
        case PairwiseKernel::kronecker:
            return d(a.first, b.first) * t(a.second, b.second);
        case PairwiseKernel::cartesian:
            return d(a.first, b.first) * (a.second == b.second ? 1.0 : 0.0) + (a.first == b.first ? 1.0 : 0.0) * t(a.second, b.second);
        case PairwiseKernel::symmetric:
            return d(a.first, b.first) * d(a.second, b.second) + d(a.first, b.second) * d(a.second, b.first);
        case PairwiseKernel::anti_symmetric:
            return d(a.first, b.first) * d(a.second, b.second) - d(a.first, b.second) * d(a.second, b.first);
        case PairwiseKernel::ranking:
            return d(a.first, b.first) - d(a.first, b.second) - d(a.second, b.first) + d(a.second, b.second);
        case PairwiseKernel::mlpk: {
            const double r = d(a.first, b.first) - d(a.first, b.second) - d(a.second, b.first) + d(a.second, b.second);
            return r * r;
        }
    }
    throw std::invalid_argument("kernel_value: unknown pairwise kernel");
}

}  // namespace pairkern
