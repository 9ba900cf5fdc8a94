#include "rsmoments/fourier.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rsmoments {

/* ---- 192-bit word helpers ------------------------------------------- */

namespace {

struct U192 {
    std::uint64_t w[3] = {0, 0, 0};
};

inline U192 u192_negate(U192 v) { // two's complement
    U192 r;
    unsigned __int128 carry = 1;
    for (int i = 0; i < 3; ++i) {
        unsigned __int128 t = (unsigned __int128)(~v.w[i]) + carry;
        r.w[i] = (std::uint64_t)t;
        carry = t >> 64;
    }
    return r;
}

} // namespace

mpz_class int192_to_mpz(const Int192& v) {
    U192 mag{{v.w[0], v.w[1], v.w[2]}};
    bool neg = v.negative();
    if (neg) mag = u192_negate(mag);
    mpz_class z;
    mpz_import(z.get_mpz_t(), 3, -1, 8, 0, 0, mag.w);
    if (neg) z = -z;
    return z;
}

Int192 int192_from_mpz(const mpz_class& v) {
    if (mpz_sizeinbase(v.get_mpz_t(), 2) > 191)
        throw std::overflow_error("value does not fit in 192-bit storage");
    U192 mag;
    size_t cnt = 0;
    mpz_class a = abs(v);
    mpz_export(mag.w, &cnt, -1, 8, 0, 0, a.get_mpz_t());
    if (sgn(v) < 0) mag = u192_negate(mag);
    Int192 r;
    r.w[0] = mag.w[0];
    r.w[1] = mag.w[1];
    r.w[2] = mag.w[2];
    return r;
}

dd int192_to_dd(const Int192& v) {
    U192 mag{{v.w[0], v.w[1], v.w[2]}};
    bool neg = v.negative();
    if (neg) mag = u192_negate(mag);
    const dd two64(18446744073709551616.0);
    dd r = dd_from_u64(mag.w[2]);
    r = dd_add(dd_mul(r, two64), dd_from_u64(mag.w[1]));
    r = dd_add(dd_mul(r, two64), dd_from_u64(mag.w[0]));
    return neg ? dd_neg(r) : r;
}

dd FourierTable::lambda_dd(std::uint64_t n) const {
    if (n < 1 || n > size()) throw std::out_of_range("lambda: n outside table");
    dd num = int192_to_dd(a_[n - 1]);
    int e = kappa_ - 1;
    dd nn(static_cast<double>(n));
    dd pw = dd_powi(nn, static_cast<unsigned>(e / 2));
    if (e & 1) pw = dd_mul(pw, dd_sqrt(nn));
    return dd_div(num, pw);
}

double FourierTable::lambda(std::uint64_t n) const { return double(lambda_dd(n)); }

/* ---- eta-product pipeline -------------------------------------------
   (prod (1-q^m))^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}  (sparse seed)
   then three exact squarings give (prod (1-q^m))^24; a(n) is the
   coefficient of q^{n-1} in that product.  The dense squarings run through
   GMP via Kronecker substitution: coefficients are packed as fixed-width
   balanced digits of one huge integer, squared once, and unpacked with a
   borrow chain.  Digit widths come from the rigorous bound
   max|product coeff| <= len * max|input coeff|^2, so unpacking can never
   alias adjacent coefficients. */

namespace {

struct SparseSeed {
    std::vector<std::uint32_t> pos;
    std::vector<std::int32_t> coeff;
};

SparseSeed seed_series(std::uint64_t deg_limit) {
    SparseSeed s;
    for (std::uint64_t k = 0;; ++k) {
        std::uint64_t tri = k * (k + 1) / 2;
        if (tri > deg_limit) break;
        std::int64_t c = 2 * (std::int64_t)k + 1;
        if (k & 1) c = -c;
        s.pos.push_back((std::uint32_t)tri);
        s.coeff.push_back((std::int32_t)c);
    }
    return s;
}

std::vector<std::int64_t> square_sparse(const SparseSeed& s, std::uint64_t n) {
    std::vector<std::int64_t> out(n, 0);
    const size_t m = s.pos.size();
    for (size_t i = 0; i < m; ++i) {
        std::uint64_t pi = s.pos[i];
        if (2 * pi >= n && i > 0) break;
        std::int64_t ci = s.coeff[i];
        for (size_t j = i; j < m; ++j) {
            std::uint64_t p = pi + s.pos[j];
            if (p >= n) break;
            std::int64_t t = ci * (std::int64_t)s.coeff[j];
            out[p] += (i == j) ? t : 2 * t;
        }
    }
    return out;
}

inline unsigned bitlen_u128(unsigned __int128 v) {
    unsigned n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

// one packed squaring: P-Q encode the signed digits, C = (P-Q)^2, out = first
// n balanced digits of C.  emit(index, digit_words, is_negative_handled_later)
// is kept concrete per stage below instead of abstracting the digit type.
mpz_class packed_square(std::vector<std::uint8_t>&& pbytes,
                        std::vector<std::uint8_t>&& qbytes) {
    mpz_class A;
    {
        mpz_class P, Q;
        mpz_import(P.get_mpz_t(), pbytes.size(), -1, 1, 0, 0, pbytes.data());
        std::vector<std::uint8_t>().swap(pbytes);
        mpz_import(Q.get_mpz_t(), qbytes.size(), -1, 1, 0, 0, qbytes.data());
        std::vector<std::uint8_t>().swap(qbytes);
        A = P - Q;
    }
    mpz_class C;
    mpz_mul(C.get_mpz_t(), A.get_mpz_t(), A.get_mpz_t());
    return C; // a square, never negative
}

std::vector<std::uint8_t> export_bytes(const mpz_class& C, size_t cap) {
    std::vector<std::uint8_t> buf(cap, 0);
    size_t cnt = 0;
    if (sgn(C) != 0) mpz_export(buf.data(), &cnt, -1, 1, 0, 0, C.get_mpz_t());
    if (cnt > cap) throw std::logic_error("packed square exceeded its size bound");
    return buf;
}

std::vector<unsigned __int128> square_digits_64(std::vector<std::int64_t>&& t, std::uint64_t n) {
    std::uint64_t maxabs = 1;
    for (std::int64_t v : t) {
        std::uint64_t a = v < 0 ? (std::uint64_t)(-v) : (std::uint64_t)v;
        maxabs = std::max(maxabs, a);
    }
    unsigned bits = bitlen_u128(n) + 2 * bitlen_u128(maxabs) + 2;
    size_t w = (bits + 7) / 8;
    if (w > 15) throw std::logic_error("digit width bound broken in stage-2 squaring");

    std::vector<std::uint8_t> pb(n * w + 16, 0), qb(n * w + 16, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::int64_t v = t[i];
        if (v == 0) continue;
        std::uint64_t a = v < 0 ? (std::uint64_t)(-v) : (std::uint64_t)v;
        std::uint8_t le[8];
        std::memcpy(le, &a, 8); // little-endian host
        std::memcpy((v > 0 ? pb : qb).data() + i * w, le, std::min<size_t>(8, w));
    }
    std::vector<std::int64_t>().swap(t);
    mpz_class C = packed_square(std::move(pb), std::move(qb));
    std::vector<std::uint8_t> buf = export_bytes(C, 2 * n * w + 32);
    C = mpz_class(); // release before unpacking

    std::vector<unsigned __int128> out(n);
    const unsigned __int128 one = 1;
    const unsigned __int128 half = one << (8 * w - 1);
    const unsigned __int128 full_minus = (one << (8 * w)) - 1; // mask
    unsigned carry = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        unsigned __int128 d = 0;
        std::memcpy(&d, buf.data() + i * w, w);
        d &= full_minus;
        unsigned __int128 v = d + carry;
        if (v >= half) {
            out[i] = v - (one << (8 * w)); // wraps: two's-complement negative
            carry = 1;
        } else {
            out[i] = v;
            carry = 0;
        }
    }
    return out;
}

std::vector<Int192> square_digits_128(std::vector<unsigned __int128>&& t, std::uint64_t n) {
    unsigned __int128 maxabs = 1;
    for (unsigned __int128 raw : t) {
        __int128 sv = (__int128)raw;
        unsigned __int128 a = sv < 0 ? (unsigned __int128)(-sv) : (unsigned __int128)sv;
        maxabs = std::max(maxabs, a);
    }
    unsigned bits = bitlen_u128(n) + 2 * bitlen_u128(maxabs) + 2;
    size_t w = (bits + 7) / 8;
    if (w > 23)
        throw std::overflow_error(
            "coefficient bound exceeds 192-bit storage; table size not supported");

    std::vector<std::uint8_t> pb(n * w + 32, 0), qb(n * w + 32, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        __int128 sv = (__int128)t[i];
        if (sv == 0) continue;
        unsigned __int128 a = sv < 0 ? (unsigned __int128)(-sv) : (unsigned __int128)sv;
        std::uint8_t le[16];
        std::memcpy(le, &a, 16);
        std::memcpy((sv > 0 ? pb : qb).data() + i * w, le, std::min<size_t>(16, w));
    }
    std::vector<unsigned __int128>().swap(t);
    mpz_class C = packed_square(std::move(pb), std::move(qb));
    std::vector<std::uint8_t> buf = export_bytes(C, 2 * n * w + 64);
    C = mpz_class(); // release before unpacking

    std::vector<Int192> out(n);
    const unsigned hb = (unsigned)(8 * w); // digit bits, <= 184
    unsigned carry = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint64_t d[3] = {0, 0, 0};
        std::memcpy(d, buf.data() + i * w, w);
        // v = d + carry
        unsigned __int128 acc = (unsigned __int128)d[0] + carry;
        std::uint64_t v0 = (std::uint64_t)acc;
        acc = (acc >> 64) + d[1];
        std::uint64_t v1 = (std::uint64_t)acc;
        acc = (acc >> 64) + d[2];
        std::uint64_t v2 = (std::uint64_t)acc;
        // compare v with 2^{hb-1}
        std::uint64_t vv[3] = {v0, v1, v2};
        std::uint64_t half[3] = {0, 0, 0};
        half[(hb - 1) / 64] = std::uint64_t(1) << ((hb - 1) % 64);
        bool geq_half = true; // equality counts as >=
        for (int k = 2; k >= 0; --k) {
            if (vv[k] != half[k]) {
                geq_half = vv[k] > half[k];
                break;
            }
        }
        Int192 o;
        if (geq_half) {
            // out = v - 2^hb  (mod 2^192 two's complement)
            std::uint64_t sub[3] = {0, 0, 0};
            sub[hb / 64] = hb % 64 ? (std::uint64_t(1) << (hb % 64)) : 1; // hb < 192
            unsigned borrow = 0;
            for (int k = 0; k < 3; ++k) {
                unsigned __int128 lhs = vv[k];
                unsigned __int128 rhs = (unsigned __int128)sub[k] + borrow;
                borrow = lhs < rhs ? 1 : 0;
                o.w[k] = (std::uint64_t)(lhs - rhs);
            }
            carry = 1;
        } else {
            o.w[0] = v0;
            o.w[1] = v1;
            o.w[2] = v2;
            carry = 0;
        }
        out[i] = o;
    }
    return out;
}

} // namespace

FourierTable compute_fourier(std::uint64_t n, const WeightConfig& w, unsigned) {
    if (w.kappa != 12)
        throw std::invalid_argument(
            "unsupported weight kappa=" + std::to_string(w.kappa) +
            "; only kappa=12 has a built-in computation (supply a coefficient file "
            "via load_fourier for other weights)");
    if (n == 0) throw std::invalid_argument("compute_fourier: n must be >= 1");

    SparseSeed seed = seed_series(n - 1);
    std::vector<std::int64_t> t1 = square_sparse(seed, n);
    std::vector<unsigned __int128> t2 = square_digits_64(std::move(t1), n);
    std::vector<Int192> a = square_digits_128(std::move(t2), n);

    if (!(a[0] == Int192{{1, 0, 0}}))
        throw std::logic_error("internal: a(1) != 1 after product expansion");
    return FourierTable(12, std::move(a), false);
}

/* ---- cache round-trip ------------------------------------------------ */

void save_fourier(const FourierTable& t, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::vector<char> iobuf(1 << 20);
    std::setvbuf(f, iobuf.data(), _IOFBF, iobuf.size());
    std::fprintf(f, "# rsmoments tau v1 kappa=%d N=%" PRIu64 "\n", t.kappa(),
                 (std::uint64_t)t.size());
    mpz_class z;
    char digits[80];
    for (std::uint64_t n = 1; n <= t.size(); ++n) {
        z = int192_to_mpz(t.raw(n));
        mpz_get_str(digits, 10, z.get_mpz_t());
        std::fprintf(f, "%" PRIu64 ",%s\n", n, digits);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

FourierTable load_fourier(const std::string& path, int expect_kappa) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open coefficient cache: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: empty cache file");
    int kappa = 0;
    std::uint64_t n = 0;
    if (std::sscanf(line.c_str(), "# rsmoments tau v1 kappa=%d N=%" SCNu64, &kappa, &n) != 2)
        throw std::runtime_error(path + ":1: bad header (expected '# rsmoments tau v1 kappa=<k> N=<n>')");
    if (n == 0) throw std::runtime_error(path + ":1: header N must be >= 1");
    if (expect_kappa != 0 && kappa != expect_kappa)
        throw std::runtime_error(path + ":1: cache holds weight kappa=" + std::to_string(kappa) +
                                 ", but kappa=" + std::to_string(expect_kappa) + " was requested");

    std::vector<Int192> a;
    a.reserve(n);
    mpz_class z;
    for (std::uint64_t i = 1; i <= n; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                     ": truncated cache, expected " + std::to_string(n) + " rows");
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(i + 1) + ": missing comma");
        errno = 0;
        char* end = nullptr;
        unsigned long long row_n = std::strtoull(line.c_str(), &end, 10);
        if (errno != 0 || end != line.c_str() + comma || row_n != i)
            throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                     ": row index mismatch (expected " + std::to_string(i) + ")");
        std::string val = line.substr(comma + 1);
        if (mpz_set_str(z.get_mpz_t(), val.c_str(), 10) != 0)
            throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                     ": not a decimal integer: '" + val + "'");
        try {
            a.push_back(int192_from_mpz(z));
        } catch (const std::overflow_error&) {
            throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                     ": coefficient exceeds 192-bit storage");
        }
    }
    while (std::getline(in, line)) {
        if (!line.empty())
            throw std::runtime_error(path + ": unexpected trailing data after row " +
                                     std::to_string(n));
    }
    if (!(a[0] == Int192{{1, 0, 0}}))
        throw std::runtime_error(path + ": a(1) must equal 1");
    return FourierTable(kappa, std::move(a), kappa != 12);
}

} // namespace rsmoments
