#include "rsmoments/radicals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "rsmoments/dd.hpp"
#include "rsmoments/hiprec.hpp"
#include "rsmoments/parallel.hpp"

namespace rsmoments {

Radical kernel_decompose(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("kernel_decompose: n must be positive");
    std::uint64_t q = 1, m = n;
    for (std::uint64_t t = 2; (unsigned __int128)t * t * t * t <= m; ++t) {
        const std::uint64_t t4 = t * t * t * t;
        while (m % t4 == 0) {
            m /= t4;
            q *= t;
        }
    }
    return {n, q, m};
}

void SignedRadicalSum::add(int sign, std::uint64_t n) {
    Radical r = kernel_decompose(n);
    auto it = terms_.emplace(r.m, 0).first;
    it->second += sign * (std::int64_t)r.q;
    if (it->second == 0) terms_.erase(it);
}

std::int64_t SignedRadicalSum::coefficient(std::uint64_t kernel) const {
    auto it = terms_.find(kernel);
    return it == terms_.end() ? 0 : it->second;
}

double SignedRadicalSum::value() const {
    dd s{};
    for (const auto& [m, coef] : terms_)
        s = dd_add(s, dd_mul(dd_fourth_root(dd_from_u64(m)), double(coef)));
    return double(s);
}

bool alpha_is_zero(const std::vector<std::uint64_t>& ns, const std::vector<int>& signs) {
    if (ns.size() < 2) throw std::invalid_argument("alpha needs at least two terms");
    if (signs.size() + 1 != ns.size())
        throw std::invalid_argument("sign vector must have one entry per term after the first");
    SignedRadicalSum s;
    s.add(+1, ns[0]);
    for (std::size_t j = 1; j < ns.size(); ++j) s.add(signs[j - 1] ? -1 : +1, ns[j]);
    return s.is_zero();
}

namespace {

// when the double-double magnitude of a sum falls inside this band around a
// decision threshold, the tuple is re-evaluated at 200 bits before being
// classified; outside the band double-double (~1e-31) is already conclusive
constexpr double kRecheckBand = 1e-25;

struct Entry {
    std::uint64_t n, q, m;
    dd root;
};

struct Level {
    int sign; // +1 or -1
    std::vector<Entry> entries;
};

std::vector<Entry> make_entries(std::uint64_t lo, std::uint64_t hi) {
    std::vector<Entry> v;
    v.reserve(hi - lo + 1);
    for (std::uint64_t n = lo; n <= hi; ++n) {
        Radical r = kernel_decompose(n);
        v.push_back({n, r.q, r.m, dd_fourth_root(dd_from_u64(n))});
    }
    return v;
}

// per-kernel signed balance with a live count of nonzero kernels; alpha is
// exactly zero iff nonzero == 0
struct FlatBalance {
    std::vector<std::int64_t> b;
    std::size_t nonzero = 0;
    explicit FlatBalance(std::uint64_t maxker) : b(maxker + 1, 0) {}
    void add(std::uint64_t m, std::int64_t d) {
        std::int64_t& v = b[m];
        if (v == 0) ++nonzero;
        v += d;
        if (v == 0) --nonzero;
    }
};

struct MapBalance {
    std::unordered_map<std::uint64_t, std::int64_t> b;
    std::size_t nonzero = 0;
    explicit MapBalance(std::uint64_t) {}
    void add(std::uint64_t m, std::int64_t d) {
        std::int64_t& v = b[m];
        if (v == 0) ++nonzero;
        v += d;
        if (v == 0) --nonzero;
    }
};

constexpr std::uint64_t kFlatBalanceLimit = 1u << 22;

template <class Bal, class Leaf>
void recurse(const std::vector<Level>& lv, std::size_t j, Bal& bal, dd partial,
             std::vector<std::uint64_t>& cur, std::size_t lo0, std::size_t hi0,
             const Leaf& leaf) {
    const Level& L = lv[j];
    const std::size_t b = (j == 0) ? lo0 : 0;
    const std::size_t e = (j == 0) ? hi0 : L.entries.size();
    for (std::size_t t = b; t < e; ++t) {
        const Entry& en = L.entries[t];
        bal.add(en.m, L.sign * (std::int64_t)en.q);
        const dd p = (L.sign > 0) ? dd_add(partial, en.root) : dd_sub(partial, en.root);
        cur[j] = en.n;
        if (j + 1 == lv.size())
            leaf(cur, p, bal.nonzero == 0);
        else
            recurse(lv, j + 1, bal, p, cur, lo0, hi0, leaf);
        bal.add(en.m, -L.sign * (std::int64_t)en.q);
    }
}

// drives one level-0 block with balance storage chosen by kernel magnitude
template <class Leaf>
void run_block(const std::vector<Level>& lv, std::uint64_t maxn, std::size_t lo0,
               std::size_t hi0, const Leaf& leaf) {
    std::vector<std::uint64_t> cur(lv.size());
    if (maxn <= kFlatBalanceLimit) {
        FlatBalance bal(maxn);
        recurse(lv, 0, bal, dd{}, cur, lo0, hi0, leaf);
    } else {
        MapBalance bal(maxn);
        recurse(lv, 0, bal, dd{}, cur, lo0, hi0, leaf);
    }
}

std::uint64_t check_budget(const std::vector<Level>& lv, std::uint64_t budget) {
    unsigned __int128 total = 1;
    for (const Level& L : lv) total *= L.entries.size();
    if (total > budget) {
        std::uint64_t req = total > std::numeric_limits<std::uint64_t>::max()
                                ? std::numeric_limits<std::uint64_t>::max()
                                : (std::uint64_t)total;
        throw BudgetError(req, budget);
    }
    return (std::uint64_t)total;
}

std::vector<int> coordinate_signs(const std::vector<int>& signs) {
    std::vector<int> s(signs.size() + 1);
    s[0] = +1;
    for (std::size_t j = 0; j < signs.size(); ++j) s[j + 1] = signs[j] ? -1 : +1;
    return s;
}

} // namespace

MinAlphaResult min_nonzero_alpha(const std::vector<Range>& ranges, const std::vector<int>& signs,
                                 std::uint64_t budget, unsigned threads) {
    if (ranges.size() < 2) throw std::invalid_argument("need at least two coordinates");
    if (signs.size() + 1 != ranges.size())
        throw std::invalid_argument("sign vector must have one entry per coordinate after the first");
    std::uint64_t maxn = 0;
    std::vector<int> cs = coordinate_signs(signs);
    std::vector<Level> lv;
    for (std::size_t j = 0; j < ranges.size(); ++j) {
        if (ranges[j].lo < 1 || ranges[j].lo > ranges[j].hi)
            throw std::invalid_argument("bad coordinate range");
        maxn = std::max(maxn, ranges[j].hi);
        lv.push_back({cs[j], make_entries(ranges[j].lo, ranges[j].hi)});
    }
    check_budget(lv, budget);

    const std::size_t size0 = lv[0].entries.size();
    const unsigned nt = resolve_threads(threads);
    const std::uint64_t nblocks = std::min<std::uint64_t>(size0, std::max<unsigned>(1, 4 * nt));
    std::vector<MinAlphaResult> part(nblocks);
    for (auto& p : part) p.value = std::numeric_limits<double>::infinity();

    parallel_blocks(nblocks, nt, [&](std::uint64_t blk) {
        auto [lo0, hi0] = block_range(size0, nblocks, blk);
        MinAlphaResult& best = part[blk];
        run_block(lv, maxn, lo0, hi0,
                  [&](const std::vector<std::uint64_t>& cur, dd a, bool exact_zero) {
                      if (exact_zero) return;
                      double v = std::abs(double(a));
                      if (v < kRecheckBand)
                          v = std::abs(hiprec::alpha_value(cur.data(), signs.data(), cur.size()));
                      if (v < best.value) {
                          best.value = v;
                          best.argmin = cur;
                      }
                  });
    });

    MinAlphaResult out;
    out.value = std::numeric_limits<double>::infinity();
    for (const auto& p : part)
        if (p.value < out.value) out = p; // block order resolves ties lexicographically
    return out;
}

std::uint64_t count_near_solutions(const CountQuery& q, std::uint64_t budget, unsigned threads) {
    if (q.N.size() < 3) throw std::invalid_argument("counting needs k >= 3 coordinates");
    if (q.signs.size() + 1 != q.N.size())
        throw std::invalid_argument("sign vector must have one entry per coordinate after the first");
    if (!(q.delta > 0)) throw std::invalid_argument("threshold must be positive");
    std::uint64_t maxn = 0;
    std::vector<int> cs = coordinate_signs(q.signs);
    std::vector<Level> lv;
    for (std::size_t j = 0; j < q.N.size(); ++j) {
        if (q.N[j] < 1) throw std::invalid_argument("dyadic base must be >= 1");
        maxn = std::max(maxn, 2 * q.N[j]);
        lv.push_back({cs[j], make_entries(q.N[j] + 1, 2 * q.N[j])});
    }
    check_budget(lv, budget);

    const std::size_t size0 = lv[0].entries.size();
    const unsigned nt = resolve_threads(threads);
    const std::uint64_t nblocks = std::min<std::uint64_t>(size0, std::max<unsigned>(1, 4 * nt));
    std::vector<std::uint64_t> part(nblocks, 0);
    const double band = kRecheckBand * (1.0 + q.delta);

    parallel_blocks(nblocks, nt, [&](std::uint64_t blk) {
        auto [lo0, hi0] = block_range(size0, nblocks, blk);
        std::uint64_t cnt = 0;
        run_block(lv, maxn, lo0, hi0,
                  [&](const std::vector<std::uint64_t>& cur, dd a, bool exact_zero) {
                      if (exact_zero) {
                          ++cnt; // alpha = 0 always satisfies |alpha| < delta
                          return;
                      }
                      const double v = std::abs(double(a));
                      if (std::abs(v - q.delta) <= band)
                          cnt += hiprec::alpha_below(cur.data(), q.signs.data(), cur.size(), q.delta);
                      else
                          cnt += (v < q.delta);
                  });
        part[blk] = cnt;
    });

    std::uint64_t total = 0;
    for (std::uint64_t c : part) total += c;
    return total;
}

std::uint64_t count_rs(std::uint64_t M, double delta, double c, std::uint64_t budget,
                       unsigned threads) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("threshold must be positive");
    if (std::nearbyint(c) == c)
        throw std::domain_error("count_rs: the exponent must be non-integral");
    if ((unsigned __int128)M * M * M * M > budget) {
        const unsigned __int128 req = (unsigned __int128)M * M * M * M;
        throw BudgetError(req > std::numeric_limits<std::uint64_t>::max()
                              ? std::numeric_limits<std::uint64_t>::max()
                              : (std::uint64_t)req,
                          budget);
    }

    const std::uint64_t lo = M + 1, hi = 2 * M, len = M;
    const double thr = delta * std::pow(double(M), c);
    const unsigned nt = resolve_threads(threads);
    const std::uint64_t nblocks = std::min<std::uint64_t>(len, std::max<unsigned>(1, 4 * nt));
    std::vector<std::uint64_t> part(nblocks, 0);
    static const std::vector<int> quad_signs = {0, 1, 1}; // +, +, -, -

    if (c == 0.25) {
        // fourth roots take the exact kernel route
        std::vector<Level> lv(4);
        for (int j = 0; j < 4; ++j) lv[j] = {j < 2 ? +1 : -1, make_entries(lo, hi)};
        const double band = kRecheckBand * (1.0 + thr);
        parallel_blocks(nblocks, nt, [&](std::uint64_t blk) {
            auto [lo0, hi0] = block_range(len, nblocks, blk);
            std::uint64_t cnt = 0;
            run_block(lv, hi, lo0, hi0,
                      [&](const std::vector<std::uint64_t>& cur, dd a, bool exact_zero) {
                          if (exact_zero) {
                              ++cnt;
                              return;
                          }
                          const double v = std::abs(double(a));
                          if (std::abs(v - thr) <= band)
                              cnt += hiprec::alpha_below(cur.data(), quad_signs.data(), 4,
                                                         thr * (1 + 1e-30));
                          else
                              cnt += (v <= thr);
                      });
            part[blk] = cnt;
        });
    } else {
        // no exactness to exploit for a general exponent: plain doubles with
        // a 200-bit recheck near the threshold
        std::vector<double> pw(len);
        for (std::uint64_t i = 0; i < len; ++i) pw[i] = std::pow(double(lo + i), c);
        const double band = 1e-13 * thr + 1e-13 * std::pow(2.0 * double(M), c);
        parallel_blocks(nblocks, nt, [&](std::uint64_t blk) {
            auto [lo0, hi0] = block_range(len, nblocks, blk);
            std::uint64_t cnt = 0;
            for (std::uint64_t i1 = lo0; i1 < hi0; ++i1)
                for (std::uint64_t i2 = 0; i2 < len; ++i2)
                    for (std::uint64_t i3 = 0; i3 < len; ++i3)
                        for (std::uint64_t i4 = 0; i4 < len; ++i4) {
                            const double v = std::abs(pw[i1] + pw[i2] - pw[i3] - pw[i4]);
                            if (std::abs(v - thr) <= band) {
                                hiprec::Real s = hiprec::Real::pow(lo + i1, c);
                                s.add(hiprec::Real::pow(lo + i2, c));
                                s.sub(hiprec::Real::pow(lo + i3, c));
                                s.sub(hiprec::Real::pow(lo + i4, c));
                                cnt += s.abs_below(thr * (1 + 1e-30));
                            } else {
                                cnt += (v <= thr);
                            }
                        }
            part[blk] = cnt;
        });
    }

    std::uint64_t total = 0;
    for (std::uint64_t v : part) total += v;
    return total;
}

} // namespace rsmoments
