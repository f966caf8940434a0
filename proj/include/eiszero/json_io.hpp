// JSON formats and the content-addressed zero-set cache.
//
// Zero-set schema:
//   {"level":N,"family":str,"k":int,"A":int,"B":int,
//    "zeros":[{"re":f,"im":f,"mult":int,"weight":"1|1/2|1/3","rad":f}],
//    "precision_bits":int,"eps":f}
// The strict-domain flag is not stored; it is a pure function of the
// coordinates and eps and is recomputed on load.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "eiszero/limitset.hpp"
#include "eiszero/zeros.hpp"

namespace eiszero {

inline std::string weight_string(const Rational& w) {
    if (w == Rational(1, 2)) return "1/2";
    if (w == Rational(1, 3)) return "1/3";
    return "1";
}

inline Rational weight_from_string(const std::string& s) {
    if (s == "1/2") return Rational(1, 2);
    if (s == "1/3") return Rational(1, 3);
    return Rational(1);
}

// Strict-domain classification from coordinates alone (mirrors the finder).
inline bool classify_strict(const Cd& z, double eps) {
    double tol = 3 * eps;
    if ((z - kPointI).abs() <= tol || (z - kPointRho).abs() <= tol) return true;
    if ((z - kPointRhoPrime).abs() <= tol) return false;
    if (std::abs(z.abs() - 1) <= tol) return z.re <= 0;
    return z.re < 0.5 - tol;
}

inline nlohmann::json zero_set_to_json(const ZeroSet& zs) {
    nlohmann::json j;
    j["level"] = zs.N;
    j["family"] = family_name(zs.family);
    j["k"] = zs.k;
    j["A"] = zs.index.A;
    j["B"] = zs.index.B;
    j["precision_bits"] = zs.precision_bits;
    j["eps"] = zs.eps;
    j["zeros"] = nlohmann::json::array();
    for (auto& r : zs.records) {
        nlohmann::json e;
        e["re"] = r.z.re;
        e["im"] = r.z.im;
        e["mult"] = r.multiplicity;
        e["weight"] = weight_string(r.elliptic_weight);
        e["rad"] = r.localization_radius;
        j["zeros"].push_back(e);
    }
    return j;
}

inline ZeroSet zero_set_from_json(const nlohmann::json& j) {
    ZeroSet zs;
    zs.N = j.at("level").get<int64_t>();
    std::string fam = j.at("family").get<std::string>();
    for (Family f : {Family::Principal, Family::Gamma0, Family::Gamma1,
                     Family::GammaUpper0, Family::Theta, Family::Custom})
        if (family_name(f) == fam) zs.family = f;
    zs.k = j.at("k").get<int>();
    zs.index = SeriesIndex(j.at("A").get<int64_t>(), j.at("B").get<int64_t>(), zs.N);
    zs.precision_bits = j.at("precision_bits").get<unsigned>();
    zs.eps = j.at("eps").get<double>();
    for (auto& e : j.at("zeros")) {
        ZeroRecord r;
        r.z = {e.at("re").get<double>(), e.at("im").get<double>()};
        r.multiplicity = e.at("mult").get<int>();
        r.elliptic_weight = weight_from_string(e.at("weight").get<std::string>());
        r.localization_radius = e.at("rad").get<double>();
        r.index = zs.index;
        r.k = zs.k;
        r.in_strict_F = classify_strict(r.z, zs.eps);
        zs.records.push_back(r);
    }
    return zs;
}

inline std::string rational_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

inline nlohmann::json config_to_json(const GeodesicConfig& cfg) {
    nlohmann::json j;
    j["clip_im"] = cfg.clip_im;
    j["resolution"] = cfg.resolution;
    j["segments"] = nlohmann::json::array();
    for (auto& s : cfg.segments) {
        nlohmann::json e;
        e["vertical"] = s.geo.vertical;
        if (s.geo.vertical) {
            e["x"] = rational_string(s.geo.x);
        } else {
            e["center"] = rational_string(s.geo.center);
            e["radius_sq"] = rational_string(s.geo.radius_sq);
        }
        e["source"] = {{s.geo.v1.m, s.geo.v1.n}, {s.geo.v2.m, s.geo.v2.n}};
        e["intervals"] = s.intervals;
        nlohmann::json poly = nlohmann::json::array();
        for (auto& p : s.polyline(cfg.resolution)) poly.push_back({p.re, p.im});
        e["polyline"] = poly;
        j["segments"].push_back(e);
    }
    return j;
}

// ---------------------------------------------------------------------------
// cache: pure function of (family, N, A, B, k, eps, p)

inline std::string cache_key(Family family, int64_t N, int64_t A, int64_t B, int k,
                             double eps, unsigned prec) {
    std::ostringstream os;
    os << family_name(family) << "|N=" << N << "|A=" << A << "|B=" << B << "|k=" << k
       << "|eps=" << std::scientific << eps << "|p=" << prec;
    return os.str();
}

inline std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

class ZeroCache {
  public:
    explicit ZeroCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(const std::string& key) const {
        std::string h = fnv1a_hex(key);
        return dir_ / h.substr(0, 2) / (h + ".json");
    }

    std::optional<ZeroSet> load(const std::string& key) const {
        auto p = path_for(key);
        if (!std::filesystem::exists(p)) return std::nullopt;
        std::ifstream in(p);
        nlohmann::json j;
        in >> j;
        if (j.value("cache_key", "") != key) return std::nullopt;  // hash collision
        return zero_set_from_json(j);
    }

    void store(const std::string& key, const ZeroSet& zs) const {
        auto p = path_for(key);
        std::filesystem::create_directories(p.parent_path());
        nlohmann::json j = zero_set_to_json(zs);
        j["cache_key"] = key;
        std::ofstream out(p);
        out << j.dump(1) << "\n";
    }

  private:
    std::filesystem::path dir_;
};

}  // namespace eiszero
