// Congruence groups modeled by their finite image G = Gamma(N)\Gamma inside
// SL2(Z/N), stored as an explicit element list. All the Kluyver sums and
// trace series downstream are plain loops over these lists.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eiszero/arith.hpp"

namespace eiszero {

struct MatModN {
    int64_t a, b, c, d;  // row-major (a b; c d), entries in [0, N)
    int64_t N;

    bool operator==(const MatModN& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator<(const MatModN& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        if (c != o.c) return c < o.c;
        return d < o.d;
    }
};

inline MatModN make_mat(int64_t a, int64_t b, int64_t c, int64_t d, int64_t N) {
    return {imod(a, N), imod(b, N), imod(c, N), imod(d, N), N};
}

inline int64_t det_mod(const MatModN& m) {
    return imod(m.a * m.d - m.b * m.c, m.N);
}

inline MatModN mat_mul(const MatModN& x, const MatModN& y) {
    int64_t N = x.N;
    return make_mat(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                    x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d, N);
}

// Inverse of a determinant-1 matrix: (d -b; -c a).
inline MatModN mat_inv(const MatModN& m) {
    return make_mat(m.d, -m.b, -m.c, m.a, m.N);
}

struct Vec2 {
    int64_t A, B;
    bool operator==(const Vec2& o) const { return A == o.A && B == o.B; }
    bool operator<(const Vec2& o) const { return A != o.A ? A < o.A : B < o.B; }
};

// Right action on row vectors: (A,B).g mod N.
inline Vec2 vector_action(const Vec2& v, const MatModN& g) {
    return {imod(v.A * g.a + v.B * g.c, g.N), imod(v.A * g.b + v.B * g.d, g.N)};
}

enum class Family { Principal, Gamma0, Gamma1, GammaUpper0, Theta, Custom };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::Principal: return "Gamma(N)";
        case Family::Gamma0: return "Gamma0(N)";
        case Family::Gamma1: return "Gamma1(N)";
        case Family::GammaUpper0: return "Gamma^0(N)";
        case Family::Theta: return "Lambda";
        case Family::Custom: return "Custom";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "gamma" || s == "principal" || s == "GammaN") return Family::Principal;
    if (s == "gamma0") return Family::Gamma0;
    if (s == "gamma1") return Family::Gamma1;
    if (s == "gamma_upper0" || s == "gammaup0" || s == "gamma^0") return Family::GammaUpper0;
    if (s == "lambda" || s == "theta") return Family::Theta;
    if (s == "custom") return Family::Custom;
    throw std::invalid_argument("unknown family: " + s);
}

struct CongruenceGroup {
    int64_t N = 1;
    Family family = Family::Principal;
    std::vector<MatModN> cosets;  // the full group G, closed under multiplication

    int64_t order() const { return static_cast<int64_t>(cosets.size()); }  // h_Gamma
};

// Closure of a generator list under multiplication (BFS; SL2(Z/N) is finite).
inline std::vector<MatModN> closure(std::vector<MatModN> gens, int64_t N) {
    std::set<MatModN> seen;
    std::vector<MatModN> todo;
    MatModN id = make_mat(1, 0, 0, 1, N);
    seen.insert(id);
    todo.push_back(id);
    for (auto& g : gens) {
        if (det_mod(g) != 1) throw std::invalid_argument("generator with det != 1 mod N");
        if (seen.insert(g).second) todo.push_back(g);
    }
    for (size_t i = 0; i < todo.size(); ++i) {
        for (auto& g : gens) {
            MatModN h = mat_mul(todo[i], g);
            if (seen.insert(h).second) todo.push_back(h);
        }
    }
    return {seen.begin(), seen.end()};
}

inline CongruenceGroup subgroup_closure(const std::vector<MatModN>& gens, int64_t N) {
    CongruenceGroup G;
    G.N = N;
    G.family = Family::Custom;
    G.cosets = closure(gens, N);
    return G;
}

inline CongruenceGroup coset_reps(Family family, int64_t N) {
    if (N < 1) throw std::invalid_argument("level must be >= 1");
    CongruenceGroup G;
    G.N = N;
    G.family = family;
    switch (family) {
        case Family::Principal:
            G.cosets = {make_mat(1, 0, 0, 1, N)};
            break;
        case Family::Gamma0:  // upper triangular mod N
            for (int64_t al = 0; al < N; ++al) {
                if (igcd(al == 0 ? N : al, N) != 1) continue;
                int64_t ai = inv_mod(al, N);
                for (int64_t be = 0; be < N; ++be)
                    G.cosets.push_back(make_mat(al, be, 0, ai, N));
            }
            break;
        case Family::Gamma1:  // unipotent
            for (int64_t be = 0; be < N; ++be)
                G.cosets.push_back(make_mat(1, be, 0, 1, N));
            break;
        case Family::GammaUpper0:  // lower triangular mod N
            for (int64_t al = 0; al < N; ++al) {
                if (igcd(al == 0 ? N : al, N) != 1) continue;
                int64_t ai = inv_mod(al, N);
                for (int64_t be = 0; be < N; ++be)
                    G.cosets.push_back(make_mat(al, 0, be, ai, N));
            }
            break;
        case Family::Theta:
            if (N != 2)
                throw std::invalid_argument("Lambda is only defined at level 2");
            G.cosets = {make_mat(1, 0, 0, 1, 2), make_mat(0, 1, 1, 0, 2)};
            break;
        case Family::Custom:
            throw std::invalid_argument("custom groups need explicit generators");
    }
    std::sort(G.cosets.begin(), G.cosets.end());
    return G;
}

inline CongruenceGroup conjugate(const CongruenceGroup& G, const MatModN& h) {
    if (det_mod(h) != 1) throw std::invalid_argument("conjugating matrix must have det 1");
    CongruenceGroup C;
    C.N = G.N;
    C.family = Family::Custom;
    MatModN hi = mat_inv(h);
    for (auto& g : G.cosets) C.cosets.push_back(mat_mul(mat_mul(hi, g), h));
    std::sort(C.cosets.begin(), C.cosets.end());
    return C;
}

// All of SL2(Z/N), generated by the images of S and T.
inline std::vector<MatModN> sl2_elements(int64_t N) {
    return closure({make_mat(0, -1, 1, 0, N), make_mat(1, 1, 0, 1, N)}, N);
}

// Distinct SL2(Z/N)-conjugates of G (deduplicated as element sets). This
// realizes the N_Gamma orbit without computing the normalizer abstractly.
inline std::vector<CongruenceGroup> conjugate_subgroups(const CongruenceGroup& G) {
    std::set<std::vector<MatModN>> seen;
    std::vector<CongruenceGroup> out;
    for (auto& h : sl2_elements(G.N)) {
        CongruenceGroup C = conjugate(G, h);
        if (seen.insert(C.cosets).second) out.push_back(C);
    }
    return out;
}

// "a,b;c,d" matrix syntax used by the CLI for custom generators.
inline MatModN parse_matrix(const std::string& text, int64_t N) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ';' || ch == ',') ch = ' ';
    std::istringstream in(s);
    int64_t a, b, c, d;
    if (!(in >> a >> b >> c >> d))
        throw std::invalid_argument("expected matrix 'a,b;c,d': " + text);
    MatModN m = make_mat(a, b, c, d, N);
    if (det_mod(m) != 1) throw std::invalid_argument("matrix has det != 1 mod N: " + text);
    return m;
}

}  // namespace eiszero
