#include "bsl/combinatorics.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bsl {

namespace {

std::string lbl(int j) { return std::to_string(j + 1); }

void check_permutation(const std::vector<int>& p, int n, const char* name)
{
    if (static_cast<int>(p.size()) != n)
        throw NotPermutation(std::string(name) + " has wrong length");
    std::vector<char> seen(n, 0);
    for (int v : p) {
        if (v < 0 || v >= n || seen[v]) throw NotPermutation(std::string(name) + " is not a permutation");
        seen[v] = 1;
    }
}

std::vector<int> inverse(const std::vector<int>& p)
{
    std::vector<int> q(p.size());
    for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
    return q;
}

} // namespace

int Combinatorics::k_max() const { return *std::max_element(half_len.begin(), half_len.end()); }
int Combinatorics::k_min() const { return *std::min_element(half_len.begin(), half_len.end()); }

int Combinatorics::gamma_pow(int m, int j) const
{
    if (m < 0) {
        auto gi = inverse(gamma);
        for (int i = 0; i < -m; ++i) j = gi[j];
        return j;
    }
    for (int i = 0; i < m; ++i) j = gamma[j];
    return j;
}

int Combinatorics::delta_pow(int m, int j) const
{
    if (m < 0) {
        auto di = inverse(delta);
        for (int i = 0; i < -m; ++i) j = di[j];
        return j;
    }
    for (int i = 0; i < m; ++i) j = delta[j];
    return j;
}

std::vector<int> Combinatorics::delta_word(int j, int len) const
{
    std::vector<int> w;
    for (int i = 0; i < len; ++i, j = delta[j]) w.push_back(j);
    return w;
}

std::vector<int> Combinatorics::gamma_word(int j, int len) const
{
    std::vector<int> w;
    for (int i = 0, x = zeta_inv[j]; i < len; ++i, x = gamma[x]) w.push_back(x);
    return w;
}

bool Combinatorics::zeta_is_rotation() const
{
    for (int j = 0; j < n(); ++j)
        if (zeta[j] != (j + 1) % n()) return false;
    return true;
}

Combinatorics build_combinatorics(int N, const std::vector<int>& zeta, const std::vector<int>& iota)
{
    if (N < 4) throw NTooSmall("N = " + std::to_string(N) + " < 4");
    const int n = 2 * N;
    check_permutation(zeta, n, "zeta");
    check_permutation(iota, n, "iota");
    {
        int len = 0, j = 0;
        do {
            j = zeta[j];
            ++len;
        } while (j != 0);
        if (len != n) throw NotPermutation("zeta is not a single 2N-cycle");
    }
    for (int j = 0; j < n; ++j) {
        if (iota[iota[j]] != j) throw NotInvolution("iota(iota(" + lbl(j) + ")) != " + lbl(j));
        if (iota[j] == j) throw HasFixedPoint("iota fixes " + lbl(j));
    }
    Combinatorics c;
    c.N = N;
    c.zeta = zeta;
    c.zeta_inv = inverse(zeta);
    c.iota = iota;
    for (int j = 0; j < n; ++j)
        if (iota[j] == zeta[j] || iota[j] == c.zeta_inv[j])
            throw AdjacentPairing("iota(" + lbl(j) + ") = " + lbl(iota[j]) + " is adjacent");
    c.gamma.resize(n);
    c.delta.resize(n);
    for (int j = 0; j < n; ++j) {
        c.gamma[j] = c.zeta_inv[iota[j]];
        c.delta[j] = zeta[iota[j]];
    }
    c.cycle_len.assign(n, 0);
    c.half_len.assign(n, 0);
    c.delta_cycle.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (c.delta_cycle[j] >= 0) continue;
        std::vector<int> cyc;
        int x = j;
        do {
            cyc.push_back(x);
            x = c.delta[x];
        } while (x != j);
        int len = static_cast<int>(cyc.size());
        if (len % 2 != 0 || len < 4)
            throw OddOrShortCycle("delta-cycle through " + lbl(j) + " has length " + std::to_string(len));
        for (int y : cyc) {
            c.delta_cycle[y] = c.num_delta_cycles;
            c.cycle_len[y] = len;
            c.half_len[y] = len / 2;
        }
        ++c.num_delta_cycles;
    }
    return c;
}

Combinatorics canonical_rotation_combinatorics(int N)
{
    if (N < 4) throw NTooSmall("N = " + std::to_string(N) + " < 4");
    const int n = 2 * N;
    std::vector<int> zeta(n), iota(n);
    for (int j = 0; j < n; ++j) {
        zeta[j] = (j + 1) % n;
        iota[j] = (j + N) % n;
    }
    return build_combinatorics(N, zeta, iota);
}

Combinatorics normalize_rotation(const Combinatorics& c)
{
    const int n = c.n();
    std::vector<int> pos(n);
    for (int i = 0, j = 0; i < n; ++i, j = c.zeta[j]) pos[j] = i;
    std::vector<int> zeta(n), iota(n);
    for (int j = 0; j < n; ++j) {
        zeta[pos[j]] = pos[c.zeta[j]];
        iota[pos[j]] = pos[c.iota[j]];
    }
    return build_combinatorics(c.N, zeta, iota);
}

std::vector<IdentityResult> verify_permutation_identities(const Combinatorics& c)
{
    const int n = c.n();
    auto inv = [](const std::vector<int>& p) { return inverse(p); };
    const auto di = inv(c.delta);
    const auto ii = inv(c.iota);
    auto fail = [](IdentityResult& r, const std::string& w) {
        if (r.pass) {
            r.pass = false;
            r.witness = w;
        }
    };
    auto gamma_cycle_len = [&](int j) {
        int len = 0, x = j;
        do {
            x = c.gamma[x];
            ++len;
        } while (x != j);
        return len;
    };
    auto same_gamma_cycle = [&](int a, int b) {
        int x = a;
        do {
            if (x == b) return true;
            x = c.gamma[x];
        } while (x != a);
        return false;
    };

    IdentityResult conj{"conj: gamma = iota^-1 delta^-1 iota", true, ""};
    IdentityResult cyc{"conj: gamma and delta have equal cycle types", true, ""};
    IdentityResult same{"same-cycle: zeta^-1(j), bar j, bar delta^(m-1)(j) share a gamma-cycle", true, ""};
    IdentityResult adj{"adj: zeta(gamma^m(j)) = bar gamma^(m-1)(j)", true, ""};
    IdentityResult adj2{"adj: zeta(bar delta^(k-1)(zeta j)) = bar gamma^(k-1)(j)", true, ""};
    IdentityResult gd1{"gamma-delta: gamma(bar delta^m(j)) = bar delta^(m-1)(j)", true, ""};
    IdentityResult gd2{"gamma-delta: delta(bar gamma^m(zeta^-1 j)) = bar gamma^(m-1)(zeta^-1 j)", true, ""};
    IdentityResult kc{"k(bar c_j) = k(j)", true, ""};

    for (int j = 0; j < n; ++j)
        if (c.gamma[j] != ii[di[c.iota[j]]]) fail(conj, "j=" + lbl(j));

    {
        std::vector<int> a, b;
        for (int j = 0; j < n; ++j) {
            a.push_back(gamma_cycle_len(j));
            b.push_back(c.cycle_len[j]);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) fail(cyc, "cycle multisets differ");
    }

    for (int j = 0; j < n; ++j) {
        const int l = c.cycle_len[j];
        if (gamma_cycle_len(c.iota[j]) != l) fail(same, "length at j=" + lbl(j));
        if (!same_gamma_cycle(c.zeta_inv[j], c.iota[j])) fail(same, "j=" + lbl(j) + " m=0");
        for (int m = 1; m <= l; ++m) {
            int x = c.iota[c.delta_pow(m - 1, j)];
            if (!same_gamma_cycle(c.zeta_inv[j], x)) fail(same, "j=" + lbl(j) + " m=" + std::to_string(m));
        }
    }

    for (int j = 0; j < n; ++j) {
        const int l = c.cycle_len[c.iota[j]];
        for (int m = 1; m <= l; ++m) {
            int lhs = c.zeta[c.gamma_pow(m, j)];
            int rhs = c.iota[c.gamma_pow(m - 1, j)];
            if (lhs != rhs) fail(adj, "j=" + lbl(j) + " m=" + std::to_string(m));
        }
        if (l % 2 == 0) {
            int k = c.half_len[c.iota[j]];
            int lhs = c.zeta[c.iota[c.delta_pow(k - 1, c.zeta[j])]];
            int rhs = c.iota[c.gamma_pow(k - 1, j)];
            if (lhs != rhs) fail(adj2, "j=" + lbl(j));
        }
    }

    for (int j = 0; j < n; ++j) {
        const int l = c.cycle_len[c.iota[j]];
        for (int m = 1; m <= l; ++m) {
            if (c.gamma[c.iota[c.delta_pow(m, j)]] != c.iota[c.delta_pow(m - 1, j)])
                fail(gd1, "j=" + lbl(j) + " m=" + std::to_string(m));
            int g = c.zeta_inv[j];
            if (c.delta[c.iota[c.gamma_pow(m, g)]] != c.iota[c.gamma_pow(m - 1, g)])
                fail(gd2, "j=" + lbl(j) + " m=" + std::to_string(m));
        }
        if (c.half_len[c.iota[c.c(j)]] != c.half_len[j]) fail(kc, "j=" + lbl(j));
    }
    return {conj, cyc, same, adj, adj2, gd1, gd2, kc};
}

bool all_pass(const std::vector<IdentityResult>& r)
{
    return std::all_of(r.begin(), r.end(), [](const IdentityResult& x) { return x.pass; });
}

Combinatorics random_combinatorics(int N, std::mt19937_64& rng)
{
    if (N < 4) throw NTooSmall("N = " + std::to_string(N) + " < 4");
    const int n = 2 * N;
    std::vector<int> zeta(n);
    for (int j = 0; j < n; ++j) zeta[j] = (j + 1) % n;
    for (;;) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> iota(n);
        for (int i = 0; i < n; i += 2) {
            iota[perm[i]] = perm[i + 1];
            iota[perm[i + 1]] = perm[i];
        }
        try {
            return build_combinatorics(N, zeta, iota);
        } catch (const Error&) {
        }
    }
}

} // namespace bsl
