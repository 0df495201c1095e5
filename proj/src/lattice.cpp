#include "qsvp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qsvp {

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

BigInt round_nearest(const BigRat& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r); // canonical: den > 0
    return floor_div(2 * num + den, 2 * den);
}

void check_square(const IntMat& rows, const char* what) {
    if (rows.empty()) throw std::invalid_argument(std::string(what) + ": empty matrix");
    for (const auto& row : rows)
        if (row.size() != rows.size())
            throw std::invalid_argument(std::string(what) + ": matrix not square");
}

} // namespace

Basis::Basis(IntMat r) : rows(std::move(r)) {
    check_square(rows, "Basis");
    dim = static_cast<int>(rows.size());
}

Basis identity_basis(int n) {
    IntMat rows(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) rows[i][i] = 1;
    return Basis(std::move(rows));
}

GramMatrix gram(const Basis& basis) {
    const int n = basis.dim;
    GramMatrix g;
    g.dim = n;
    g.entries.assign(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            BigInt dot = 0;
            for (int k = 0; k < n; ++k) dot += basis.rows[i][k] * basis.rows[j][k];
            g.entries[i][j] = dot;
            g.entries[j][i] = dot;
        }
    }
    return g;
}

BigInt norm_sq(const CoeffVec& x, const GramMatrix& gram_matrix) {
    const int n = gram_matrix.dim;
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("norm_sq: coefficient length does not match Gram dimension");
    BigInt total = 0;
    for (int i = 0; i < n; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < n; ++j) {
            if (x[j] == 0) continue;
            total += gram_matrix.entries[i][j] * x[i] * x[j];
        }
    }
    return total;
}

LatticeVector to_lattice_vector(const CoeffVec& x, const Basis& basis) {
    const int n = basis.dim;
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("to_lattice_vector: dimension mismatch");
    LatticeVector v;
    v.coords.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < n; ++j) v.coords[j] += x[i] * basis.rows[i][j];
    }
    v.norm_sq = 0;
    for (const auto& c : v.coords) v.norm_sq += c * c;
    return v;
}

BigInt determinant(const Basis& basis) {
    // Bareiss fraction-free elimination; all divisions exact.
    IntMat m = basis.rows;
    const int n = basis.dim;
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int pivot_row = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    pivot_row = i;
                    break;
                }
            if (pivot_row < 0) return 0;
            std::swap(m[k], m[pivot_row]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

Basis hnf(const Basis& basis) {
    const int n = basis.dim;
    IntMat m = basis.rows;
    for (int col = 0; col < n; ++col) {
        // clear below the diagonal with unimodular 2x2 gcd combinations
        for (int row = col + 1; row < n; ++row) {
            if (m[row][col] == 0) continue;
            const BigInt a = m[col][col];
            const BigInt b = m[row][col];
            const auto [g, u, v] = ext_gcd(a, b);
            const BigInt a_over_g = a / g;
            const BigInt b_over_g = b / g;
            for (int k = 0; k < n; ++k) {
                const BigInt top = u * m[col][k] + v * m[row][k];
                const BigInt bot = a_over_g * m[row][k] - b_over_g * m[col][k];
                m[col][k] = top;
                m[row][k] = bot;
            }
        }
        if (m[col][col] == 0) throw std::invalid_argument("hnf: singular basis");
        if (m[col][col] < 0)
            for (int k = 0; k < n; ++k) m[col][k] = -m[col][k];
        // reduce the column above the pivot into [0, pivot)
        for (int row = 0; row < col; ++row) {
            const BigInt q = floor_div(m[row][col], m[col][col]);
            if (q == 0) continue;
            for (int k = 0; k < n; ++k) m[row][k] -= q * m[col][k];
        }
    }
    return Basis(std::move(m));
}

GramSchmidtData gram_schmidt(const Basis& basis) {
    const int n = basis.dim;
    GramSchmidtData gs;
    gs.ortho_rows.assign(n, RatVec(n, 0));
    gs.mu.assign(n, RatVec(n, 0));
    RatVec star_norm(n, 0);
    for (int i = 0; i < n; ++i) {
        RatVec star(n);
        for (int k = 0; k < n; ++k) star[k] = BigRat(basis.rows[i][k]);
        for (int j = 0; j < i; ++j) {
            BigRat dot = 0;
            for (int k = 0; k < n; ++k) dot += BigRat(basis.rows[i][k]) * gs.ortho_rows[j][k];
            const BigRat mu_ij = dot / star_norm[j];
            gs.mu[i][j] = mu_ij;
            for (int k = 0; k < n; ++k) star[k] -= mu_ij * gs.ortho_rows[j][k];
        }
        BigRat norm = 0;
        for (int k = 0; k < n; ++k) norm += star[k] * star[k];
        if (norm == 0) throw std::invalid_argument("gram_schmidt: singular basis");
        star_norm[i] = norm;
        gs.ortho_rows[i] = std::move(star);
    }
    return gs;
}

namespace {

// squared norms of the Gram-Schmidt rows
RatVec star_norms(const GramSchmidtData& gs) {
    RatVec norms(gs.ortho_rows.size(), 0);
    for (std::size_t i = 0; i < gs.ortho_rows.size(); ++i) {
        BigRat n = 0;
        for (const auto& c : gs.ortho_rows[i]) n += c * c;
        norms[i] = n;
    }
    return norms;
}

} // namespace

LllResult lll_reduce_with_transform(const Basis& basis, const BigRat& delta) {
    if (!(delta > BigRat(1, 4) && delta <= 1))
        throw std::invalid_argument("lll_reduce: delta must lie in (0.25, 1]");
    const int n = basis.dim;
    IntMat b = basis.rows;
    IntMat u(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) u[i][i] = 1;

    auto gs = gram_schmidt(Basis(b));
    auto bn = star_norms(gs);

    auto size_reduce = [&](int k, int j) {
        const BigInt r = round_nearest(gs.mu[k][j]);
        if (r == 0) return;
        for (int col = 0; col < n; ++col) {
            b[k][col] -= r * b[j][col];
            u[k][col] -= r * u[j][col];
        }
        for (int jj = 0; jj < j; ++jj) gs.mu[k][jj] -= BigRat(r) * gs.mu[j][jj];
        gs.mu[k][j] -= BigRat(r);
    };

    int k = 1;
    while (k < n) {
        for (int j = k - 1; j >= 0; --j) size_reduce(k, j);
        const BigRat lhs = delta * bn[k - 1];
        const BigRat rhs = bn[k] + gs.mu[k][k - 1] * gs.mu[k][k - 1] * bn[k - 1];
        if (lhs <= rhs) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            std::swap(u[k], u[k - 1]);
            gs = gram_schmidt(Basis(b));
            bn = star_norms(gs);
            k = std::max(k - 1, 1);
        }
    }
    LllResult result;
    result.reduced = Basis(std::move(b));
    result.transform.entries = std::move(u);
    result.transform.dim = n;
    return result;
}

Basis lll_reduce(const Basis& basis, const BigRat& delta) {
    return lll_reduce_with_transform(basis, delta).reduced;
}

UnimodularMatrix random_unimodular(int n, int num_ops, Rng& rng) {
    if (num_ops < 0) throw std::invalid_argument("random_unimodular: num_ops must be >= 0");
    IntMat u(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) u[i][i] = 1;
    for (int op = 0; op < num_ops; ++op) {
        const int i = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
        int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - 1)));
        if (j >= i) ++j;
        const int sign = rng.coin() ? 1 : -1;
        for (int k = 0; k < n; ++k) u[i][k] += sign * u[j][k];
    }
    UnimodularMatrix result;
    result.entries = std::move(u);
    result.dim = n;
    return result;
}

Basis scramble(const Basis& basis, const UnimodularMatrix& u) {
    if (u.dim != basis.dim) throw std::invalid_argument("scramble: dimension mismatch");
    const int n = basis.dim;
    IntMat out(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (u.entries[i][k] == 0) continue;
            for (int j = 0; j < n; ++j) out[i][j] += u.entries[i][k] * basis.rows[k][j];
        }
    return Basis(std::move(out));
}

Basis random_basis_uniform(int n, Rng& rng, int entry_bound) {
    while (true) {
        IntMat rows(n, IntVec(n));
        for (auto& row : rows)
            for (auto& e : row) e = rng.range(-entry_bound, entry_bound);
        Basis candidate(std::move(rows));
        if (determinant(candidate) != 0) return candidate;
    }
}

namespace {

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

} // namespace

Basis random_basis_prime_hnf(int n, Rng& rng, std::int64_t p_min, std::int64_t p_max) {
    std::int64_t p;
    do {
        p = rng.range(p_min, p_max);
    } while (!is_prime(p));
    IntMat rows(n, IntVec(n, 0));
    for (int i = 0; i < n - 1; ++i) {
        rows[i][i] = 1;
        rows[i][n - 1] = rng.range(0, p - 1);
    }
    rows[n - 1][n - 1] = p;
    return Basis(std::move(rows));
}

int default_scramble_ops(int n) {
    // tuned so the mean row-length growth of a scrambled uniform basis lands
    // near 10-12 (measured over 200 seeded pairs per dimension)
    return 5 * n + 6;
}

GoodBadPair random_good_bad_pair(int n, Rng& rng, int num_ops) {
    if (num_ops < 0) num_ops = default_scramble_ops(n);
    GoodBadPair pair;
    pair.good = random_basis_uniform(n, rng, 4);
    pair.transform = random_unimodular(n, num_ops, rng);
    pair.bad = scramble(pair.good, pair.transform);
    auto mean_row_length = [](const Basis& b) {
        double total = 0;
        for (const auto& row : b.rows) {
            BigInt nsq = 0;
            for (const auto& e : row) nsq += e * e;
            total += std::sqrt(nsq.convert_to<double>());
        }
        return total / static_cast<double>(b.dim);
    };
    pair.length_growth = mean_row_length(pair.bad) / mean_row_length(pair.good);
    return pair;
}

namespace {

// Schnorr-Euchner style depth-first enumeration with exact rational bounds.
class SvpSearch {
  public:
    SvpSearch(const Basis& reduced, const GramSchmidtData& gs)
        : l_(reduced), mu_(gs.mu), bnorm_(star_norms(gs)), n_(reduced.dim), z_(reduced.dim, 0) {
        best_q_ = 0;
        for (int i = 0; i < n_; ++i) {
            BigInt row_norm = 0;
            for (const auto& e : l_.rows[i]) row_norm += e * e;
            if (i == 0 || row_norm < best_q_) best_q_ = row_norm;
        }
    }

    void run() { descend(n_ - 1, BigRat(0)); }

    const BigInt& best() const { return best_q_; }
    const std::vector<CoeffVec>& minimizer_coords() const { return best_z_; }

  private:
    void descend(int level, const BigRat& energy_above) {
        if (level < 0) {
            accept();
            return;
        }
        BigRat center = 0;
        for (int j = level + 1; j < n_; ++j)
            if (z_[j] != 0) center -= mu_[j][level] * z_[j];
        const BigInt z0 = round_nearest(center);
        for (BigInt zv = z0;; ++zv) {
            if (!try_value(level, zv, center, energy_above)) break;
        }
        for (BigInt zv = z0 - 1;; --zv) {
            if (!try_value(level, zv, center, energy_above)) break;
        }
        z_[level] = 0;
    }

    // returns false once this direction is pruned
    bool try_value(int level, const BigInt& zv, const BigRat& center, const BigRat& energy_above) {
        const BigRat diff = BigRat(zv) - center;
        const BigRat energy = energy_above + bnorm_[level] * diff * diff;
        if (energy > best_q_) return false;
        z_[level] = to_int64_checked(zv, "svp_enumerate");
        descend(level - 1, energy);
        return true;
    }

    void accept() {
        bool all_zero = true;
        for (auto v : z_)
            if (v != 0) {
                all_zero = false;
                break;
            }
        if (all_zero) return;
        // exact integer norm through the reduced basis
        BigInt q = 0;
        for (int col = 0; col < n_; ++col) {
            BigInt c = 0;
            for (int i = 0; i < n_; ++i)
                if (z_[i] != 0) c += z_[i] * l_.rows[i][col];
            q += c * c;
        }
        if (q > best_q_) return;
        if (q < best_q_) {
            best_q_ = q;
            best_z_.clear();
        }
        best_z_.push_back(z_);
    }

    const Basis& l_;
    const RatMat& mu_;
    RatVec bnorm_;
    int n_;
    CoeffVec z_;
    BigInt best_q_;
    std::vector<CoeffVec> best_z_;
};

} // namespace

SvpResult svp_enumerate(const Basis& basis, int dim_cap) {
    if (basis.dim > dim_cap)
        throw CapExceeded("svp_enumerate: dimension " + std::to_string(basis.dim) +
                          " above oracle cap " + std::to_string(dim_cap));
    const auto lll = lll_reduce_with_transform(basis);
    const auto gs = gram_schmidt(lll.reduced);
    SvpSearch search(lll.reduced, gs);
    search.run();

    const int n = basis.dim;
    std::set<CoeffVec> unique;
    for (const auto& z : search.minimizer_coords()) {
        CoeffVec x(n, 0);
        for (int j = 0; j < n; ++j) {
            BigInt acc = 0;
            for (int i = 0; i < n; ++i)
                if (z[i] != 0) acc += z[i] * lll.transform.entries[i][j];
            x[j] = to_int64_checked(acc, "svp_enumerate");
        }
        unique.insert(x);
    }

    SvpResult result;
    result.lambda1_sq = search.best();
    result.minimizers.assign(unique.begin(), unique.end());
    // canonical representative: positive leading nonzero, lexicographically smallest
    bool have_canonical = false;
    for (const auto& x : result.minimizers) {
        std::int64_t lead = 0;
        for (auto v : x)
            if (v != 0) {
                lead = v;
                break;
            }
        if (lead > 0) {
            result.canonical = x;
            have_canonical = true;
            break; // minimizers are sorted, first qualifying is lex smallest
        }
    }
    if (!have_canonical && !result.minimizers.empty()) result.canonical = result.minimizers.front();
    std::int64_t inf = 0, sum = 0;
    for (auto v : result.canonical) {
        inf = std::max(inf, std::abs(v));
        sum += v;
    }
    result.inf_norm_xmin = inf;
    result.coeff_sum_abs = std::abs(sum);
    return result;
}

CoeffVec coeff_of_vector(const Basis& basis, const IntVec& v) {
    const int n = basis.dim;
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("coeff_of_vector: dimension mismatch");
    // solve x . B = v by rational Gaussian elimination on B^T x^T = v^T
    RatMat a(n, RatVec(n + 1, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = BigRat(basis.rows[j][i]);
        a[i][n] = BigRat(v[i]);
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int row = col; row < n; ++row)
            if (a[row][col] != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0) throw std::invalid_argument("coeff_of_vector: singular basis");
        std::swap(a[col], a[pivot]);
        for (int row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const BigRat factor = a[row][col] / a[col][col];
            for (int k = col; k <= n; ++k) a[row][k] -= factor * a[col][k];
        }
    }
    CoeffVec x(n);
    for (int i = 0; i < n; ++i) {
        const BigRat xi = a[i][n] / a[i][i];
        if (boost::multiprecision::denominator(xi) != 1)
            throw std::domain_error("coeff_of_vector: vector is not in the lattice");
        x[i] = to_int64_checked(boost::multiprecision::numerator(xi), "coeff_of_vector");
    }
    return x;
}

} // namespace qsvp
