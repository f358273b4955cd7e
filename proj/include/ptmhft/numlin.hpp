#pragma once

// Dense complex linear algebra at desk scale: storage types, LU based
// inverse/solve, a general eigensolver (Householder Hessenberg reduction,
// shifted QR to Schur form, triangular back-substitution for eigenvectors
// with an inverse-iteration polish on the Hessenberg form) and a
// scaling-and-squaring matrix exponential.

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ptmhft {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double machine_eps = std::numeric_limits<double>::epsilon();

namespace detail {

inline bool all_finite(std::span<const cplx> xs)
{
	return std::all_of(xs.begin(), xs.end(), [](const cplx& z) {
		return std::isfinite(z.real()) && std::isfinite(z.imag());
	});
}

} // namespace detail

class ComplexVector
{
public:
	explicit ComplexVector(std::size_t dim) : data_(dim)
	{
		if(dim == 0) throw InvalidInput("ComplexVector: dimension must be >= 1");
	}

	ComplexVector(std::initializer_list<cplx> xs) : ComplexVector(std::vector<cplx>(xs)) {}

	explicit ComplexVector(std::vector<cplx> xs) : data_{std::move(xs)}
	{
		if(data_.empty()) throw InvalidInput("ComplexVector: dimension must be >= 1");
		if(!detail::all_finite(data_)) throw InvalidInput("ComplexVector: non-finite entry");
	}

	[[nodiscard]] std::size_t dim() const noexcept { return data_.size(); }

	cplx& operator[](std::size_t i) { return data_[i]; }
	const cplx& operator[](std::size_t i) const { return data_[i]; }

	[[nodiscard]] std::span<const cplx> entries() const noexcept { return data_; }
	[[nodiscard]] std::span<cplx> entries() noexcept { return data_; }

	[[nodiscard]] double norm() const
	{
		double s = 0.0;
		for(const auto& z : data_) s += std::norm(z);
		return std::sqrt(s);
	}

	ComplexVector& operator+=(const ComplexVector& o)
	{
		check_same(o);
		for(std::size_t i = 0; i < dim(); ++i) data_[i] += o.data_[i];
		return *this;
	}

	ComplexVector& operator-=(const ComplexVector& o)
	{
		check_same(o);
		for(std::size_t i = 0; i < dim(); ++i) data_[i] -= o.data_[i];
		return *this;
	}

	ComplexVector& operator*=(cplx s)
	{
		for(auto& z : data_) z *= s;
		return *this;
	}

	friend ComplexVector operator+(ComplexVector a, const ComplexVector& b) { return a += b; }
	friend ComplexVector operator-(ComplexVector a, const ComplexVector& b) { return a -= b; }
	friend ComplexVector operator*(cplx s, ComplexVector a) { return a *= s; }
	friend ComplexVector operator*(ComplexVector a, cplx s) { return a *= s; }

private:
	void check_same(const ComplexVector& o) const
	{
		if(o.dim() != dim()) throw DimensionMismatch("ComplexVector: dimension mismatch");
	}

	std::vector<cplx> data_;
};

/// Conjugate-linear in the first argument: a^H b.
inline cplx dot(const ComplexVector& a, const ComplexVector& b)
{
	if(a.dim() != b.dim()) throw DimensionMismatch("dot: dimension mismatch");
	cplx s{};
	for(std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
	return s;
}

/// Row-major dense complex matrix.
class ComplexMatrix
{
public:
	ComplexMatrix(std::size_t rows, std::size_t cols)
		: rows_{rows}, cols_{cols}, data_(rows * cols)
	{
		if(rows == 0 || cols == 0) throw InvalidInput("ComplexMatrix: shape must be at least 1x1");
	}

	ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
		: rows_{rows}, cols_{cols}, data_{std::move(entries)}
	{
		if(rows == 0 || cols == 0) throw InvalidInput("ComplexMatrix: shape must be at least 1x1");
		if(data_.size() != rows * cols)
			throw InvalidInput("ComplexMatrix: entry count does not match shape");
		if(!detail::all_finite(data_)) throw InvalidInput("ComplexMatrix: non-finite entry");
	}

	ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
		: ComplexMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0, flatten(rows))
	{
	}

	static ComplexMatrix identity(std::size_t n)
	{
		ComplexMatrix m(n, n);
		for(std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
		return m;
	}

	static ComplexMatrix diagonal(std::span<const cplx> d)
	{
		ComplexMatrix m(d.size(), d.size());
		for(std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
		return m;
	}

	static ComplexMatrix diagonal(std::initializer_list<cplx> d)
	{
		return diagonal(std::span<const cplx>(d.begin(), d.size()));
	}

	/// Columns of the result are the given vectors.
	static ComplexMatrix from_columns(std::span<const ComplexVector> cols)
	{
		if(cols.empty()) throw InvalidInput("from_columns: no columns");
		ComplexMatrix m(cols.front().dim(), cols.size());
		for(std::size_t j = 0; j < cols.size(); ++j) m.set_col(j, cols[j]);
		return m;
	}

	[[nodiscard]] std::size_t rows() const noexcept { return rows_; }
	[[nodiscard]] std::size_t cols() const noexcept { return cols_; }
	[[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

	cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
	const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

	[[nodiscard]] std::span<const cplx> entries() const noexcept { return data_; }

	[[nodiscard]] bool is_finite() const { return detail::all_finite(data_); }

	[[nodiscard]] ComplexVector col(std::size_t j) const
	{
		std::vector<cplx> v(rows_);
		for(std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
		return ComplexVector(std::move(v));
	}

	void set_col(std::size_t j, const ComplexVector& v)
	{
		if(v.dim() != rows_) throw DimensionMismatch("set_col: dimension mismatch");
		for(std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
	}

	[[nodiscard]] ComplexMatrix adjoint() const
	{
		ComplexMatrix r(cols_, rows_);
		for(std::size_t i = 0; i < rows_; ++i)
			for(std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
		return r;
	}

	[[nodiscard]] ComplexMatrix transpose() const
	{
		ComplexMatrix r(cols_, rows_);
		for(std::size_t i = 0; i < rows_; ++i)
			for(std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
		return r;
	}

	[[nodiscard]] ComplexMatrix conjugate() const
	{
		ComplexMatrix r = *this;
		for(auto& z : r.data_) z = std::conj(z);
		return r;
	}

	[[nodiscard]] double norm_fro() const
	{
		double s = 0.0;
		for(const auto& z : data_) s += std::norm(z);
		return std::sqrt(s);
	}

	[[nodiscard]] double max_abs() const
	{
		double m = 0.0;
		for(const auto& z : data_) m = std::max(m, std::abs(z));
		return m;
	}

	ComplexMatrix& operator+=(const ComplexMatrix& o)
	{
		check_same(o);
		for(std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
		return *this;
	}

	ComplexMatrix& operator-=(const ComplexMatrix& o)
	{
		check_same(o);
		for(std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
		return *this;
	}

	ComplexMatrix& operator*=(cplx s)
	{
		for(auto& z : data_) z *= s;
		return *this;
	}

	friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
	friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
	friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
	friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

	friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
	{
		if(a.cols_ != b.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
		ComplexMatrix r(a.rows_, b.cols_);
		for(std::size_t i = 0; i < a.rows_; ++i)
			for(std::size_t k = 0; k < a.cols_; ++k)
			{
				const cplx aik = a(i, k);
				if(aik == cplx{}) continue;
				for(std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
			}
		return r;
	}

	friend ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x)
	{
		if(a.cols_ != x.dim()) throw DimensionMismatch("matrix-vector product: dimension mismatch");
		std::vector<cplx> y(a.rows_);
		for(std::size_t i = 0; i < a.rows_; ++i)
		{
			cplx s{};
			for(std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
			y[i] = s;
		}
		return ComplexVector(std::move(y));
	}

private:
	static std::vector<cplx> flatten(std::initializer_list<std::initializer_list<cplx>> rows)
	{
		std::vector<cplx> out;
		const std::size_t width = rows.size() ? rows.begin()->size() : 0;
		for(const auto& r : rows)
		{
			if(r.size() != width) throw InvalidInput("ComplexMatrix: ragged initializer");
			out.insert(out.end(), r.begin(), r.end());
		}
		return out;
	}

	void check_same(const ComplexMatrix& o) const
	{
		if(o.rows_ != rows_ || o.cols_ != cols_)
			throw DimensionMismatch("ComplexMatrix: shape mismatch");
	}

	std::size_t rows_;
	std::size_t cols_;
	std::vector<cplx> data_;
};

/// Outer product |a><b|.
inline ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b)
{
	ComplexMatrix m(a.dim(), b.dim());
	for(std::size_t i = 0; i < a.dim(); ++i)
		for(std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
	return m;
}

/// Kronecker product; index (i, j) of a and (k, l) of b map to row i*b.rows()+k.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
	ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
	for(std::size_t i = 0; i < a.rows(); ++i)
		for(std::size_t j = 0; j < a.cols(); ++j)
			for(std::size_t k = 0; k < b.rows(); ++k)
				for(std::size_t l = 0; l < b.cols(); ++l)
					r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
	return r;
}

// ---------------------------------------------------------------------------
// LU factorisation, solve, inverse
// ---------------------------------------------------------------------------

/// Packed LU with partial pivoting, P A = L U.
struct LuFactors
{
	ComplexMatrix lu;
	std::vector<std::size_t> perm;
};

/// Pivot magnitude below 1e-14 * ||A||_F raises Singular.
inline LuFactors lu_factor(const ComplexMatrix& a)
{
	if(!a.is_square()) throw InvalidInput("lu_factor: matrix must be square");
	if(!a.is_finite()) throw InvalidInput("lu_factor: non-finite entry");
	const std::size_t n = a.rows();
	const double anorm = a.norm_fro();
	const double threshold = 1e-14 * anorm;
	LuFactors f{a, std::vector<std::size_t>(n)};
	std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
	auto& m = f.lu;
	double min_pivot = std::numeric_limits<double>::infinity();
	for(std::size_t k = 0; k < n; ++k)
	{
		std::size_t p = k;
		for(std::size_t i = k + 1; i < n; ++i)
			if(std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
		const double piv = std::abs(m(p, k));
		min_pivot = std::min(min_pivot, piv);
		if(piv <= threshold || anorm == 0.0)
		{
			const double cond = piv > 0.0 ? anorm / piv : std::numeric_limits<double>::infinity();
			throw Singular("matrix is singular to working precision (pivot " + std::to_string(piv) +
					" at column " + std::to_string(k) + ")", cond);
		}
		if(p != k)
		{
			for(std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(k, j));
			std::swap(f.perm[p], f.perm[k]);
		}
		for(std::size_t i = k + 1; i < n; ++i)
		{
			const cplx l = m(i, k) / m(k, k);
			m(i, k) = l;
			if(l == cplx{}) continue;
			for(std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
		}
	}
	return f;
}

/// Solves A X = B given the factors of A.
inline ComplexMatrix lu_solve(const LuFactors& f, const ComplexMatrix& b)
{
	const std::size_t n = f.lu.rows();
	if(b.rows() != n) throw DimensionMismatch("lu_solve: dimension mismatch");
	ComplexMatrix x(n, b.cols());
	for(std::size_t i = 0; i < n; ++i)
		for(std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[i], j);
	for(std::size_t c = 0; c < b.cols(); ++c)
	{
		for(std::size_t i = 1; i < n; ++i)
		{
			cplx s = x(i, c);
			for(std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * x(k, c);
			x(i, c) = s;
		}
		for(std::size_t ii = n; ii-- > 0;)
		{
			cplx s = x(ii, c);
			for(std::size_t k = ii + 1; k < n; ++k) s -= f.lu(ii, k) * x(k, c);
			x(ii, c) = s / f.lu(ii, ii);
		}
	}
	return x;
}

inline ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b)
{
	return lu_solve(lu_factor(a), b);
}

inline ComplexMatrix inverse(const ComplexMatrix& a)
{
	return lu_solve(lu_factor(a), ComplexMatrix::identity(a.rows()));
}

/// Frobenius-norm condition number ||A||_F ||A^-1||_F; +inf when A is singular.
inline double condition_fro(const ComplexMatrix& a)
{
	try
	{
		return a.norm_fro() * inverse(a).norm_fro();
	}
	catch(const Singular&)
	{
		return std::numeric_limits<double>::infinity();
	}
}

// ---------------------------------------------------------------------------
// General eigensolver
// ---------------------------------------------------------------------------

struct EigResult
{
	std::vector<cplx> values;
	/// Column i is the unit-norm right eigenvector for values[i].
	ComplexMatrix right_vectors;
	/// max_i ||H v_i - lambda_i v_i|| / ||H||
	double residual;
};

namespace detail {

// Householder reduction A = Q H Q^H with H upper Hessenberg.
inline void hessenberg_reduce(ComplexMatrix& h, ComplexMatrix& q)
{
	const std::size_t n = h.rows();
	q = ComplexMatrix::identity(n);
	if(n < 3) return;
	std::vector<cplx> v(n);
	for(std::size_t k = 0; k + 2 < n; ++k)
	{
		double xnorm2 = 0.0;
		for(std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
		const double xnorm = std::sqrt(xnorm2);
		if(xnorm == 0.0) continue;
		const cplx x0 = h(k + 1, k);
		const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
		const cplx alpha = -phase * xnorm;
		std::fill(v.begin(), v.end(), cplx{});
		v[k + 1] = x0 - alpha;
		for(std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
		double vnorm2 = 0.0;
		for(std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
		if(vnorm2 == 0.0) continue;
		const double beta = 2.0 / vnorm2;
		// H <- (I - beta v v^H) H
		for(std::size_t j = 0; j < n; ++j)
		{
			cplx s{};
			for(std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
			s *= beta;
			for(std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
		}
		// H <- H (I - beta v v^H), Q <- Q (I - beta v v^H)
		for(auto* m : {&h, &q})
		{
			for(std::size_t i = 0; i < n; ++i)
			{
				cplx s{};
				for(std::size_t j = k + 1; j < n; ++j) s += (*m)(i, j) * v[j];
				s *= beta;
				for(std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= s * std::conj(v[j]);
			}
		}
		for(std::size_t i = k + 2; i < n; ++i) h(i, k) = cplx{};
	}
}

struct Givens
{
	double c;
	cplx s;
};

// Rotation G with G^H [a; b] = [r; 0].
inline Givens make_givens(cplx a, cplx b)
{
	const double bn = std::abs(b);
	if(bn == 0.0) return {1.0, cplx{}};
	const double an = std::abs(a);
	if(an == 0.0) return {0.0, std::conj(b) / bn * cplx{1.0}};
	const double r = std::hypot(an, bn);
	const cplx phase = a / an;
	return {an / r, phase * std::conj(b) / r};
}

// Eigenvalue of [[a, b], [c, d]] closest to d.
inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d)
{
	// roots are (a + d)/2 +- disc, and (a + d)/2 = d + half
	const cplx half = 0.5 * (a - d);
	const cplx disc = std::sqrt(half * half + b * c);
	const cplx m1 = d + half + disc;
	const cplx m2 = d + half - disc;
	return std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
}

// Shifted QR iteration on an upper Hessenberg matrix. On return t is upper
// triangular and z accumulates the unitary similarity (A = Z T Z^H).
inline void schur_qr(ComplexMatrix& t, ComplexMatrix& z, std::size_t max_iter)
{
	const std::size_t n = t.rows();
	const double tnorm = t.norm_fro();
	std::size_t total = 0;
	std::size_t hi = n - 1;
	std::size_t since_deflation = 0;
	std::vector<Givens> rots;
	while(hi > 0)
	{
		// locate the start of the unreduced block ending at hi
		std::size_t lo = hi;
		while(lo > 0)
		{
			double scale = std::abs(t(lo, lo)) + std::abs(t(lo - 1, lo - 1));
			if(scale == 0.0) scale = tnorm;
			if(std::abs(t(lo, lo - 1)) <= machine_eps * scale)
			{
				t(lo, lo - 1) = cplx{};
				break;
			}
			--lo;
		}
		if(lo == hi)
		{
			--hi;
			since_deflation = 0;
			continue;
		}
		if(++total > max_iter)
			throw NonConvergence("eig_general: QR iteration cap (" + std::to_string(max_iter) +
					") reached");
		++since_deflation;

		cplx shift;
		if(since_deflation % 11 == 10)
			shift = t(hi, hi) + 0.75 * std::abs(t(hi, hi - 1));
		else
			shift = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));

		// explicit shifted QR on the active window [lo, hi]
		for(std::size_t k = lo; k <= hi; ++k) t(k, k) -= shift;
		rots.clear();
		for(std::size_t k = lo; k < hi; ++k)
		{
			const Givens g = make_givens(t(k, k), t(k + 1, k));
			rots.push_back(g);
			// rows k, k+1 <- G^H rows
			for(std::size_t j = k; j < n; ++j)
			{
				const cplx x = t(k, j);
				const cplx y = t(k + 1, j);
				t(k, j) = g.c * x + g.s * y;
				t(k + 1, j) = -std::conj(g.s) * x + g.c * y;
			}
			t(k + 1, k) = cplx{};
		}
		for(std::size_t k = lo; k < hi; ++k)
		{
			const Givens& g = rots[k - lo];
			// columns k, k+1 <- columns G
			const std::size_t last = std::min(k + 1, hi);
			for(std::size_t i = 0; i <= last; ++i)
			{
				const cplx x = t(i, k);
				const cplx y = t(i, k + 1);
				t(i, k) = g.c * x + std::conj(g.s) * y;
				t(i, k + 1) = -g.s * x + g.c * y;
			}
			for(std::size_t i = 0; i < n; ++i)
			{
				const cplx x = z(i, k);
				const cplx y = z(i, k + 1);
				z(i, k) = g.c * x + std::conj(g.s) * y;
				z(i, k + 1) = -g.s * x + g.c * y;
			}
		}
		for(std::size_t k = lo; k <= hi; ++k) t(k, k) += shift;
	}
	for(std::size_t i = 1; i < n; ++i)
		for(std::size_t j = 0; j < i; ++j) t(i, j) = cplx{};
}

// Eigenvectors of an upper triangular T by back-substitution. Within a
// numerically degenerate pair of diagonal entries a vanishing right-hand side
// is read as a diagonalizable cluster (component set to zero); a non-vanishing
// one as a Jordan coupling, which is kept and yields nearly parallel vectors.
inline ComplexMatrix triangular_eigenvectors(const ComplexMatrix& t)
{
	const std::size_t n = t.rows();
	const double tnorm = std::max(t.norm_fro(), std::numeric_limits<double>::min());
	const double smin = std::max(machine_eps * tnorm, std::numeric_limits<double>::min());
	ComplexMatrix x(n, n);
	std::vector<cplx> v(n);
	for(std::size_t k = 0; k < n; ++k)
	{
		std::fill(v.begin(), v.end(), cplx{});
		v[k] = 1.0;
		double vmax = 1.0;
		for(std::size_t jj = k; jj-- > 0;)
		{
			cplx s{};
			for(std::size_t m = jj + 1; m <= k; ++m) s += t(jj, m) * v[m];
			cplx d = t(jj, jj) - t(k, k);
			if(std::abs(d) < smin)
			{
				if(std::abs(s) <= 64.0 * machine_eps * tnorm * vmax)
				{
					v[jj] = cplx{};
					continue;
				}
				d = smin;
			}
			v[jj] = -s / d;
			vmax = std::max(vmax, std::abs(v[jj]));
			if(vmax > 1e100)
			{
				for(std::size_t m = jj; m <= k; ++m) v[m] /= vmax;
				vmax = 1.0;
			}
		}
		for(std::size_t i = 0; i < n; ++i) x(i, k) = v[i];
	}
	return x;
}

inline double column_residual(const ComplexMatrix& h, const ComplexMatrix& v, std::size_t j,
		cplx lambda)
{
	const std::size_t n = h.rows();
	double s = 0.0;
	for(std::size_t i = 0; i < n; ++i)
	{
		cplx r = -lambda * v(i, j);
		for(std::size_t k = 0; k < n; ++k) r += h(i, k) * v(k, j);
		s += std::norm(r);
	}
	return std::sqrt(s);
}

inline void normalize_column(ComplexMatrix& v, std::size_t j)
{
	double s = 0.0;
	for(std::size_t i = 0; i < v.rows(); ++i) s += std::norm(v(i, j));
	s = std::sqrt(s);
	if(s == 0.0) return;
	// fix the phase so the largest component is real positive
	std::size_t imax = 0;
	for(std::size_t i = 1; i < v.rows(); ++i)
		if(std::abs(v(i, j)) > std::abs(v(imax, j)) * (1.0 + 1e-12)) imax = i;
	const cplx phase = std::conj(v(imax, j)) / std::abs(v(imax, j));
	for(std::size_t i = 0; i < v.rows(); ++i) v(i, j) *= phase / s;
}

// One step of inverse iteration on the Hessenberg form hh for the vector y.
inline void inverse_iteration_step(const ComplexMatrix& hh, std::vector<cplx>& y, cplx lambda)
{
	const std::size_t n = hh.rows();
	const double hnorm = std::max(hh.norm_fro(), std::numeric_limits<double>::min());
	ComplexMatrix a = hh;
	const cplx sigma = lambda + cplx{machine_eps * hnorm, 0.0};
	for(std::size_t i = 0; i < n; ++i) a(i, i) -= sigma;
	// Gaussian elimination exploiting the single subdiagonal
	std::vector<cplx> b = y;
	for(std::size_t k = 0; k + 1 < n; ++k)
	{
		if(std::abs(a(k + 1, k)) > std::abs(a(k, k)))
		{
			for(std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(k + 1, j));
			std::swap(b[k], b[k + 1]);
		}
		if(a(k, k) == cplx{}) a(k, k) = machine_eps * hnorm;
		const cplx l = a(k + 1, k) / a(k, k);
		for(std::size_t j = k; j < n; ++j) a(k + 1, j) -= l * a(k, j);
		b[k + 1] -= l * b[k];
	}
	for(std::size_t ii = n; ii-- > 0;)
	{
		cplx s = b[ii];
		for(std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * b[j];
		if(a(ii, ii) == cplx{}) a(ii, ii) = machine_eps * hnorm;
		b[ii] = s / a(ii, ii);
	}
	y = std::move(b);
}

} // namespace detail

/// Deterministic eigenvalue order: ascending real part, with real parts
/// closer than `cluster_tol` grouped and ordered by ascending imaginary part;
/// ties keep the original index order.
inline std::vector<std::size_t> eigen_order(std::span<const cplx> values, double cluster_tol)
{
	std::vector<std::size_t> idx(values.size());
	std::iota(idx.begin(), idx.end(), std::size_t{0});
	std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
		return values[a].real() < values[b].real();
	});
	std::size_t start = 0;
	while(start < idx.size())
	{
		std::size_t end = start + 1;
		while(end < idx.size() &&
				values[idx[end]].real() - values[idx[end - 1]].real() <= cluster_tol)
			++end;
		std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
				idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
					if(values[a].imag() != values[b].imag()) return values[a].imag() < values[b].imag();
					return a < b;
				});
		start = end;
	}
	return idx;
}

/// Eigen-decomposition of a general complex square matrix.
///
/// Eigenvalues come back in `eigen_order` with unit-norm right eigenvectors.
/// Throws NonConvergence when the QR sweep cap (100 n) is reached or the
/// final residual exceeds tol * n.
inline EigResult eig_general(const ComplexMatrix& h, double tol = 1e-12)
{
	if(!h.is_square()) throw InvalidInput("eig_general: matrix must be square");
	if(!h.is_finite()) throw InvalidInput("eig_general: non-finite entry");
	if(!(tol > 0.0)) throw InvalidInput("eig_general: tol must be positive");
	const std::size_t n = h.rows();
	const double hnorm = h.norm_fro();
	if(hnorm == 0.0)
		return {std::vector<cplx>(n), ComplexMatrix::identity(n), 0.0};

	ComplexMatrix hess = h;
	ComplexMatrix q(n, n);
	detail::hessenberg_reduce(hess, q);
	ComplexMatrix t = hess;
	ComplexMatrix zs = ComplexMatrix::identity(n);
	detail::schur_qr(t, zs, 100 * n);

	std::vector<cplx> lambda(n);
	for(std::size_t i = 0; i < n; ++i) lambda[i] = t(i, i);

	const ComplexMatrix xs = detail::triangular_eigenvectors(t);
	ComplexMatrix y_hess = zs * xs; // eigenvectors of the Hessenberg form
	ComplexMatrix v = q * y_hess;
	for(std::size_t j = 0; j < n; ++j) detail::normalize_column(v, j);

	// polish any vector whose residual is not yet at working accuracy
	for(std::size_t j = 0; j < n; ++j)
	{
		if(detail::column_residual(h, v, j, lambda[j]) <= tol * hnorm) continue;
		std::vector<cplx> y(n);
		for(std::size_t i = 0; i < n; ++i) y[i] = y_hess(i, j);
		for(int step = 0; step < 2; ++step) detail::inverse_iteration_step(hess, y, lambda[j]);
		for(std::size_t i = 0; i < n; ++i)
		{
			cplx s{};
			for(std::size_t k = 0; k < n; ++k) s += q(i, k) * y[k];
			v(i, j) = s;
		}
		detail::normalize_column(v, j);
	}

	const auto order = eigen_order(lambda, std::sqrt(machine_eps) * std::max(1.0, hnorm));
	EigResult out{std::vector<cplx>(n), ComplexMatrix(n, n), 0.0};
	for(std::size_t k = 0; k < n; ++k)
	{
		out.values[k] = lambda[order[k]];
		for(std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = v(i, order[k]);
	}
	for(std::size_t k = 0; k < n; ++k)
		out.residual = std::max(out.residual,
				detail::column_residual(h, out.right_vectors, k, out.values[k]) / hnorm);
	if(out.residual > tol * static_cast<double>(n))
		throw NonConvergence("eig_general: eigenvector residual " + std::to_string(out.residual) +
				" exceeds tol * n");
	return out;
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// exp(A) by scaling and squaring with a diagonal [6/6] Pade approximant.
/// Used where a spectral decomposition is unavailable or as an independent
/// route for checking one.
inline ComplexMatrix expm(const ComplexMatrix& a)
{
	if(!a.is_square()) throw InvalidInput("expm: matrix must be square");
	const std::size_t n = a.rows();
	const double anorm = a.norm_fro();
	int squarings = 0;
	if(anorm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(anorm / 0.5)));
	const ComplexMatrix x = a * cplx{std::ldexp(1.0, -squarings)};

	constexpr int q = 6;
	double c = 1.0;
	ComplexMatrix xk = ComplexMatrix::identity(n);
	ComplexMatrix num = ComplexMatrix::identity(n);
	ComplexMatrix den = ComplexMatrix::identity(n);
	for(int k = 1; k <= q; ++k)
	{
		c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
		xk = x * xk;
		num += cplx{c} * xk;
		den += cplx{(k % 2 ? -c : c)} * xk;
	}
	ComplexMatrix e = solve(den, num);
	for(int s = 0; s < squarings; ++s) e = e * e;
	return e;
}

} // namespace ptmhft
