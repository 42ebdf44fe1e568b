#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stringdyn {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

inline Int lcm_int(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return abs_int(a / gcd_int(a, b) * b);
}

// Returns g = gcd(a, b) >= 0 together with x, y such that a*x + b*y = g.
struct ExtGcd {
  Int g, x, y;
};

inline ExtGcd ext_gcd(const Int& a, const Int& b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = std::move(r);
    r = std::move(tmp);
    tmp = old_s - q * s;
    old_s = std::move(s);
    s = std::move(tmp);
    tmp = old_t - q * t;
    old_t = std::move(t);
    t = std::move(tmp);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

// Floor-style residue in [0, m) for m > 0.
inline Int mod_floor(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

// Floor division for m > 0.
inline Int div_floor(const Int& a, const Int& m) {
  Int q = a / m;
  if ((a % m) != 0 && a < 0) q -= 1;
  return q;
}

inline Int pow_int(Int base, unsigned exp) {
  Int result = 1;
  while (exp) {
    if (exp & 1u) result *= base;
    base *= base;
    exp >>= 1u;
  }
  return result;
}

// Modular inverse of a modulo m (m >= 1); throws if not invertible.
inline Int inv_mod(const Int& a, const Int& m) {
  if (m == 1) return 0;
  auto e = ext_gcd(mod_floor(a, m), m);
  if (e.g != 1) throw std::domain_error("inv_mod: element not invertible");
  return mod_floor(e.x, m);
}

inline std::string to_string(const Int& a) { return a.str(); }

// Number of bits of |a|; 0 for a = 0.
inline std::size_t msb_len(const Int& a) {
  if (a == 0) return 0;
  return boost::multiprecision::msb(abs_int(a)) + 1;
}

// Primes up to n by sieve.
inline std::vector<unsigned> primes_up_to(unsigned n) {
  std::vector<bool> comp(n + 1, false);
  std::vector<unsigned> out;
  for (unsigned i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (unsigned long long j = 1ULL * i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

inline bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t to_u64(const Int& a) {
  if (a < 0 || a > Int(std::numeric_limits<std::uint64_t>::max()))
    throw std::overflow_error("to_u64: out of range");
  return static_cast<std::uint64_t>(a);
}

inline long long to_ll(const Int& a) {
  if (a < Int(std::numeric_limits<long long>::min()) ||
      a > Int(std::numeric_limits<long long>::max()))
    throw std::overflow_error("to_ll: out of range");
  return static_cast<long long>(a);
}

// Miller-Rabin, deterministic for 64-bit inputs and probabilistic beyond.
inline bool is_probable_prime(const Int& n) {
  if (n < 2) return false;
  static const unsigned small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (unsigned p : small) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  Int d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (unsigned a : small) {
    Int x = boost::multiprecision::powm(Int(a), d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline Int pollard_rho(const Int& n) {
  if (n % 2 == 0) return 2;
  for (Int c = 1;; ++c) {
    Int x = 2, y = 2, d = 1;
    auto f = [&](const Int& v) { return (v * v + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = gcd_int(x > y ? Int(x - y) : Int(y - x), n);
    }
    if (d != n) return d;
  }
}

inline void factor_into(Int n, std::vector<Int>& out) {
  if (n == 1) return;
  for (unsigned p = 2; p < 1000; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
    if (n == 1) return;
    if (Int(p) * p > n) {
      out.push_back(n);
      return;
    }
  }
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  Int d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

struct PrimePower {
  Int prime;
  unsigned exponent;
};

// Prime factorization of |n| (n != 0), primes ascending.
inline std::vector<PrimePower> factorize(const Int& n) {
  if (n == 0) throw std::domain_error("factorize: zero");
  std::vector<Int> primes;
  detail::factor_into(abs_int(n), primes);
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> out;
  for (const auto& p : primes) {
    if (!out.empty() && out.back().prime == p)
      ++out.back().exponent;
    else
      out.push_back({p, 1});
  }
  return out;
}

// All positive divisors of |n| (n != 0), ascending.
inline std::vector<Int> divisors(const Int& n) {
  std::vector<Int> divs{1};
  for (const auto& pp : factorize(n)) {
    std::size_t base = divs.size();
    Int pk = 1;
    for (unsigned e = 1; e <= pp.exponent; ++e) {
      pk *= pp.prime;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

inline Int lcm_range(unsigned n) {
  Int l = 1;
  for (unsigned i = 2; i <= n; ++i) l = lcm_int(l, i);
  return l;
}

inline unsigned euler_phi(unsigned n) {
  unsigned result = n;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

}  // namespace stringdyn
