#pragma once

// The recursive set-system behind the adversary: ground sets of size n_l,
// families of n_{l-1}-point subsets built from a shared prefix M and disjoint
// blocks, and a verifier for the three covering properties the construction
// needs. Also home to the harmonic-number helpers the analysis uses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wks/core.hpp"
#include "wks/rational.hpp"

namespace wks {

// Ground-set sizes: n_0 = 1, n_l = (ceil(n_{l-1}/2) + 1) * (floor(n_{l-1}/2) + 1).
// Grows doubly exponentially; n_9 is the first value past 64 bits.
inline std::int64_t n_seq(int level) {
    if (level < 0) throw std::domain_error("n_seq: level must be >= 0");
    std::int64_t n = 1;
    for (int l = 1; l <= level; ++l) {
        std::int64_t half_up = n / 2 + n % 2 + 1;
        std::int64_t half_down = n / 2 + 1;
        n = detail::checked_mul(half_up, half_down, "n_seq");
    }
    return n;
}

// Number of families at level l: ceil(n_{l-1}/2) + 1.
inline std::int64_t family_count(int level) {
    if (level < 1) throw std::domain_error("family_count: level must be >= 1");
    std::int64_t prev = n_seq(level - 1);
    return prev / 2 + prev % 2 + 1;
}

// Every family at level l has exactly n_{l-1} points.
inline std::int64_t family_size(int level) {
    if (level < 1) throw std::domain_error("family_size: level must be >= 1");
    return n_seq(level - 1);
}

inline Rational harmonic_exact(std::int64_t n) {
    if (n < 1) throw std::domain_error("harmonic_exact: n must be >= 1");
    Rational h = 0;
    for (std::int64_t i = 1; i <= n; ++i) h += Rational(1, i);
    return h;
}

// Exact below the cutoff; Neumaier-compensated summation above it.
inline double harmonic(std::int64_t n, std::int64_t exact_cutoff = 256) {
    if (n < 1) throw std::domain_error("harmonic: n must be >= 1");
    if (n <= exact_cutoff) return to_double(harmonic_exact(n));
    double sum = 0.0;
    double comp = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) {
        double term = 1.0 / static_cast<double>(i);
        double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

// A ground set together with its families. meta_m / meta_partition record how
// the canonical construction chose the shared prefix and the disjoint blocks;
// the property-3 witness uses them to avoid an exhaustive search.
struct SetSystem {
    std::vector<PointId> ground;
    std::vector<std::vector<PointId>> families;
    std::vector<PointId> meta_m;
    std::vector<std::vector<PointId>> meta_partition;

    friend bool operator==(const SetSystem&, const SetSystem&) = default;
};

// Canonical construction over the given points (which must number n_l and be
// distinct): M is the first ceil(n_{l-1}/2) + 1 points, the rest splits into
// |M| consecutive blocks Q_r of size floor(n_{l-1}/2), and the family for the
// r-th point of M is (M minus that point) followed by Q_r, in input order.
inline SetSystem build_set_system(const std::vector<PointId>& points, int level) {
    if (level < 1) throw std::domain_error("build_set_system: level must be >= 1");
    std::int64_t want = n_seq(level);
    if (static_cast<std::int64_t>(points.size()) != want) {
        throw std::domain_error("build_set_system: need exactly " + std::to_string(want) +
                                " points for level " + std::to_string(level) + ", got " +
                                std::to_string(points.size()));
    }
    {
        std::vector<PointId> sorted = points;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::domain_error("build_set_system: points must be distinct");
        }
    }

    std::int64_t prev = n_seq(level - 1);
    std::size_t m_size = static_cast<std::size_t>(prev / 2 + prev % 2 + 1);
    std::size_t block = static_cast<std::size_t>(prev / 2);

    SetSystem sys;
    sys.ground = points;
    sys.meta_m.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(m_size));

    sys.meta_partition.reserve(m_size);
    std::size_t pos = m_size;
    for (std::size_t r = 0; r < m_size; ++r) {
        sys.meta_partition.emplace_back(points.begin() + static_cast<std::ptrdiff_t>(pos),
                                        points.begin() + static_cast<std::ptrdiff_t>(pos + block));
        pos += block;
    }
    if (pos != points.size()) {
        throw std::domain_error("build_set_system: internal sizing mismatch");
    }

    sys.families.reserve(m_size);
    for (std::size_t r = 0; r < m_size; ++r) {
        std::vector<PointId> fam;
        fam.reserve(static_cast<std::size_t>(prev));
        for (std::size_t j = 0; j < m_size; ++j) {
            if (j != r) fam.push_back(sys.meta_m[j]);
        }
        fam.insert(fam.end(), sys.meta_partition[r].begin(), sys.meta_partition[r].end());
        sys.families.push_back(std::move(fam));
    }
    return sys;
}

// Verification outcome, one flag per property. Failures carry the offending
// point; they are reported here, never thrown.
struct SetSystemReport {
    // 1: ceil(n_{l-1}/2) + 1 families, each of size n_{l-1}, all inside a
    //    ground set of size n_l.
    bool sizes_ok = false;
    // 2: every ground point is avoided by some family.
    bool avoidance_ok = false;
    // 3: every ground point p has a partner q such that each family contains
    //    p or q.
    bool witness_ok = false;
    std::optional<PointId> avoidance_counterexample;
    std::optional<PointId> witness_counterexample;

    bool all_ok() const { return sizes_ok && avoidance_ok && witness_ok; }
};

namespace detail {

// Bitmask rows over, one bit per ground-set position.
struct FamilyMasks {
    std::size_t words = 0;
    std::vector<std::vector<std::uint64_t>> rows;
    bool indexable = true;

    FamilyMasks(const SetSystem& sys) {
        words = sys.ground.size() / 64 + 1;
        std::vector<std::int32_t> idx;
        PointId max_id = -1;
        for (PointId p : sys.ground) {
            if (p < 0) indexable = false;
            max_id = std::max(max_id, p);
        }
        if (indexable) {
            idx.assign(static_cast<std::size_t>(max_id) + 1, -1);
            for (std::size_t i = 0; i < sys.ground.size(); ++i) {
                idx[static_cast<std::size_t>(sys.ground[i])] = static_cast<std::int32_t>(i);
            }
        }
        rows.reserve(sys.families.size());
        for (const auto& fam : sys.families) {
            std::vector<std::uint64_t> row(words, 0);
            for (PointId p : fam) {
                std::int32_t gi = -1;
                if (indexable && p >= 0 && static_cast<std::size_t>(p) < idx.size()) {
                    gi = idx[static_cast<std::size_t>(p)];
                }
                if (gi < 0) {
                    indexable = false;
                    continue;
                }
                row[static_cast<std::size_t>(gi) / 64] |= std::uint64_t{1}
                                                          << (static_cast<std::size_t>(gi) % 64);
            }
            rows.push_back(std::move(row));
        }
    }

    bool contains(std::size_t family, std::size_t gi) const {
        return (rows[family][gi / 64] >> (gi % 64)) & 1;
    }
};

}  // namespace detail

// Exhaustively checks the three properties. With no families at all,
// property 2 fails on every ground point (no family avoids it) while
// property 3 holds vacuously.
inline SetSystemReport verify_set_system(const SetSystem& sys, int level) {
    if (level < 1) throw std::domain_error("verify_set_system: level must be >= 1");
    SetSystemReport rep;

    detail::FamilyMasks masks(sys);

    rep.sizes_ok = masks.indexable &&
                   static_cast<std::int64_t>(sys.ground.size()) == n_seq(level) &&
                   static_cast<std::int64_t>(sys.families.size()) == family_count(level);
    if (rep.sizes_ok) {
        for (const auto& fam : sys.families) {
            if (static_cast<std::int64_t>(fam.size()) != family_size(level)) {
                rep.sizes_ok = false;
                break;
            }
        }
    }

    // Property 2: each ground point is missing from at least one family.
    rep.avoidance_ok = true;
    for (std::size_t gi = 0; gi < sys.ground.size(); ++gi) {
        bool avoided = false;
        for (std::size_t f = 0; f < masks.rows.size(); ++f) {
            if (!masks.contains(f, gi)) {
                avoided = true;
                break;
            }
        }
        if (!avoided) {
            rep.avoidance_ok = false;
            rep.avoidance_counterexample = sys.ground[gi];
            break;
        }
    }

    // Property 3: for each p, the families avoiding p must share a common
    // point q; q then covers every family p does not.
    rep.witness_ok = true;
    std::vector<std::uint64_t> meet(masks.words);
    for (std::size_t gi = 0; gi < sys.ground.size(); ++gi) {
        std::fill(meet.begin(), meet.end(), ~std::uint64_t{0});
        bool any_missing = false;
        for (std::size_t f = 0; f < masks.rows.size(); ++f) {
            if (masks.contains(f, gi)) continue;
            any_missing = true;
            for (std::size_t w = 0; w < masks.words; ++w) meet[w] &= masks.rows[f][w];
        }
        if (!any_missing) continue;
        bool found = false;
        for (std::size_t w = 0; w < masks.words && !found; ++w) {
            std::uint64_t bits = meet[w];
            if (w == masks.words - 1 && sys.ground.size() % 64 != 0) {
                bits &= (std::uint64_t{1} << (sys.ground.size() % 64)) - 1;
            }
            if (w == masks.words - 1 && sys.ground.size() % 64 == 0) bits = 0;
            found = bits != 0;
        }
        if (!found) {
            rep.witness_ok = false;
            rep.witness_counterexample = sys.ground[gi];
            break;
        }
    }

    return rep;
}

// Returns a q such that every family contains p or q. Uses the construction
// metadata when present (p in M: the first other point of M; p in block Q_r:
// the point r owning that block) and falls back to exhaustive search for
// externally loaded systems.
inline PointId property3_witness(const SetSystem& sys, PointId p) {
    if (std::find(sys.ground.begin(), sys.ground.end(), p) == sys.ground.end()) {
        throw std::domain_error("property3_witness: point not in ground set");
    }

    if (sys.meta_m.size() >= 2 && sys.meta_partition.size() == sys.meta_m.size()) {
        auto in_m = std::find(sys.meta_m.begin(), sys.meta_m.end(), p);
        if (in_m != sys.meta_m.end()) {
            return sys.meta_m[in_m == sys.meta_m.begin() ? 1 : 0];
        }
        for (std::size_t r = 0; r < sys.meta_partition.size(); ++r) {
            const auto& block = sys.meta_partition[r];
            if (std::find(block.begin(), block.end(), p) != block.end()) {
                return sys.meta_m[r];
            }
        }
    }

    for (PointId q : sys.ground) {
        if (q == p) continue;
        bool works = true;
        for (const auto& fam : sys.families) {
            bool has_p = std::find(fam.begin(), fam.end(), p) != fam.end();
            bool has_q = std::find(fam.begin(), fam.end(), q) != fam.end();
            if (!has_p && !has_q) {
                works = false;
                break;
            }
        }
        if (works) return q;
    }
    throw std::runtime_error("property3_witness: no witness exists; system violates property 3");
}

}  // namespace wks
