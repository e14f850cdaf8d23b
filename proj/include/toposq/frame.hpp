#pragma once

#include <optional>
#include <vector>

#include "toposq/bundle.hpp"

namespace toposq {

struct RegularityReport {
    bool regular = true;
    std::optional<BundleOpen> witness;
    std::size_t elements = 0;
};

// The frame of opens of one variant over a bundle. Operations reject opens
// tagged with another variant or failing the openness condition.
class Frame {
public:
    Frame(const SpectralBundle& bundle, Variant v) : bundle_(&bundle), variant_(v) {}

    const SpectralBundle& bundle() const noexcept { return *bundle_; }
    Variant variant() const noexcept { return variant_; }

    BundleOpen top() const { return bundle_->top(variant_); }
    BundleOpen bottom() const { return bundle_->bottom(variant_); }

    void check(const BundleOpen& u) const {
        if (u.variant != variant_) {
            throw Error(ErrorCode::FrameMismatch,
                        std::string("expected ") + to_string(variant_) + ", got " + to_string(u.variant));
        }
        if (!bundle_->is_open(u)) throw Error(ErrorCode::FrameMismatch, "fibers are not open in this frame");
    }

    bool leq(const BundleOpen& u, const BundleOpen& v) const {
        check(u);
        check(v);
        return fibers_subset(u.fibers, v.fibers);
    }

    BundleOpen meet(const BundleOpen& u, const BundleOpen& v) const {
        check(u);
        check(v);
        BundleOpen out = u;
        for (std::size_t c = 0; c < out.fibers.size(); ++c) out.fibers[c] &= v.fibers[c];
        return out;
    }

    BundleOpen join(const BundleOpen& u, const BundleOpen& v) const {
        check(u);
        check(v);
        BundleOpen out = u;
        for (std::size_t c = 0; c < out.fibers.size(); ++c) out.fibers[c] |= v.fibers[c];
        return out;
    }

    BundleOpen big_join(const std::vector<BundleOpen>& us) const {
        BundleOpen out = bottom();
        for (const auto& u : us) out = join(out, u);
        return out;
    }

    BundleOpen heyting_arrow(const BundleOpen& u, const BundleOpen& v) const {
        check(u);
        check(v);
        if (variant_ == Variant::clopen_star) return clopen_arrow(u, v);
        Fibers implication(u.fibers.size());
        for (std::size_t c = 0; c < implication.size(); ++c) {
            implication[c] = (bundle_->full_fiber(c) & ~u.fibers[c]) | v.fibers[c];
        }
        return bundle_->interior(implication, variant_);
    }

    BundleOpen negation(const BundleOpen& u) const { return heyting_arrow(u, bottom()); }

    // u ⋞ v iff ¬u ∨ v = ⊤.
    bool well_inside(const BundleOpen& u, const BundleOpen& v) const {
        return join(negation(u), v) == top();
    }

    std::vector<BundleOpen> elements(std::size_t cap = SpectralBundle::kDefaultCap) const {
        return bundle_->enumerate_opens(variant_, cap);
    }

    // Checks x = ⋁{y : y ⋞ x} for every element. Basic opens saturate({(C,λ)})
    // are tried first, finest contexts first, so a failing basic open is
    // reported in preference to an arbitrary one.
    RegularityReport regularity_report(std::size_t cap = 100000) const {
        const auto all = elements(cap);
        RegularityReport report;
        report.elements = all.size();
        std::vector<BundleOpen> candidates;
        for (std::size_t c = bundle_->context_count(); c-- > 0;) {
            for (std::size_t k = 0; k < bundle_->fiber_size(c); ++k) {
                candidates.push_back(bundle_->saturate(bundle_->single_point({c, k}), variant_));
            }
        }
        candidates.insert(candidates.end(), all.begin(), all.end());
        for (const auto& x : candidates) {
            BundleOpen approx = bottom();
            for (const auto& y : all) {
                if (well_inside(y, x)) approx = join(approx, y);
            }
            if (!(approx == x)) {
                report.regular = false;
                report.witness = x;
                return report;
            }
        }
        return report;
    }

private:
    // (R ⇒ S)(C) = {λ : for all D ⊆ C, λ|D ∈ R(D) implies λ|D ∈ S(D)}.
    BundleOpen clopen_arrow(const BundleOpen& r, const BundleOpen& s) const {
        const auto& poset = bundle_->poset();
        BundleOpen out = bottom();
        for (std::size_t c = 0; c < poset.size(); ++c) {
            for (std::size_t k = 0; k < bundle_->fiber_size(c); ++k) {
                bool ok = true;
                for (std::size_t d : poset.below(c)) {
                    const std::size_t j = bundle_->restrict_index(c, k, d);
                    if (has_bit(r.fibers[d], j) && !has_bit(s.fibers[d], j)) ok = false;
                }
                if (ok) out.fibers[c] |= bit(k);
            }
        }
        return out;
    }

    const SpectralBundle* bundle_;
    Variant variant_;
};

// The embedding of clopen subobjects into star opens: same fibers, new tag.
inline BundleOpen embed_clopen(const BundleOpen& s) {
    if (s.variant != Variant::clopen_star) throw Error(ErrorCode::FrameMismatch, "expected a clopen-star element");
    return {Variant::star, s.fibers};
}

// The bundle projection maps closed sets to closed sets of the poset
// (up-sets for star, down-sets for costar).
inline bool projection_is_closed(const SpectralBundle& b, const BundleClosed& f) {
    const auto& poset = b.poset();
    std::vector<char> image(poset.size(), 0);
    for (std::size_t c = 0; c < poset.size(); ++c) image[c] = f.fibers[c] != 0;
    for (std::size_t c = 0; c < poset.size(); ++c) {
        if (!image[c]) continue;
        const auto reach = restriction_closed(f.variant) ? poset.above(c) : poset.below(c);
        for (std::size_t d : reach) {
            if (!image[d]) return false;
        }
    }
    return true;
}

}  // namespace toposq
