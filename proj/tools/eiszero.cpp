// Command-line front end: kappa tables, certified evaluation, zero sets with
// caching, sweeps, limit configurations, Hausdorff / discrepancy series, the
// CM audit, SVG rendering, and a combined report.
//
// Exit codes: 0 ok, 2 certification failure, 3 precision failure, 4 bad input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "eiszero/json_io.hpp"
#include "eiszero/parallel.hpp"
#include "eiszero/stats.hpp"
#include "eiszero/svg.hpp"

using namespace eiszero;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string family = "gamma";
    int64_t N = 3;
    std::vector<std::string> generators;  // for custom groups, "a,b;c,d"
    double eps = 1e-8;
    unsigned prec = 53;
    std::string cache_dir = "eiszero-cache";
    std::string out;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    // later occurrences win, so explicit flags override config-file values
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", "read options from a key=value file (expanded before parsing)");
    cmd->add_option("--family", o.family,
                    "gamma | gamma0 | gamma1 | gamma_upper0 | lambda | custom");
    cmd->add_option("-N,--level", o.N, "level N");
    cmd->add_option("--generator", o.generators, "custom generator 'a,b;c,d' (repeatable)");
    cmd->add_option("--eps", o.eps, "target accuracy / zero isolation radius");
    cmd->add_option("--prec", o.prec, "working precision in bits (53 = double)");
    cmd->add_option("--cache-dir", o.cache_dir, "zero-set cache directory");
    cmd->add_option("-o,--out", o.out, "output path");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all)");
}

CongruenceGroup make_group(const CommonOpts& o) {
    Family f = family_from_string(o.family);
    if (f == Family::Custom) {
        std::vector<MatModN> gens;
        for (auto& g : o.generators) gens.push_back(parse_matrix(g, o.N));
        return subgroup_closure(gens, o.N);
    }
    return coset_reps(f, o.N);
}

fs::path cache_root(const CommonOpts& o) {
    if (const char* env = std::getenv("EISZERO_CACHE")) return env;
    return o.cache_dir;
}

Cd parse_z(const std::string& s) {
    // "x+yi" with either part optional; "1.2i", "-0.3+0.9i", "2", "1e-3+2e-2i"
    double x = 0, y = 0;
    std::string t = s;
    if (!t.empty() && t.back() == 'i') {
        // the split sign is the last +/- not belonging to an exponent
        size_t split = std::string::npos;
        for (size_t p = t.size(); p-- > 1;) {
            if ((t[p] == '+' || t[p] == '-') && t[p - 1] != 'e' && t[p - 1] != 'E') {
                split = p;
                break;
            }
        }
        if (split == std::string::npos) {
            t.pop_back();
            y = t.empty() ? 1 : std::stod(t);
        } else {
            x = std::stod(t.substr(0, split));
            std::string ys = t.substr(split, t.size() - split - 1);
            y = (ys == "+" ? 1 : ys == "-" ? -1 : std::stod(ys));
        }
    } else {
        x = std::stod(t);
    }
    return {x, y};
}

std::ostream& output(const CommonOpts& o, std::ofstream& file) {
    if (o.out.empty()) return std::cout;
    file.open(o.out);
    if (!file) throw std::invalid_argument("cannot open output: " + o.out);
    return file;
}

ZeroSet cached_find_zeros(const CommonOpts& o, const CongruenceGroup& G,
                          const SeriesIndex& idx, int k) {
    // Trace forms with kappa^{a,b} >= 2 take values ~ kappa^{-k} over most of
    // the search region; raise the precision so they stay certifiable.
    unsigned prec = o.prec;
    int64_t kap = kappa_ab(G, idx.A, idx.B).kappa;
    if (kap >= 2) {
        auto need = static_cast<unsigned>(k * std::log2(double(kap)) + 64);
        prec = std::max(prec, need);
    }
    ZeroCache cache(cache_root(o));
    std::string key = cache_key(G.family, G.N, idx.A, idx.B, k, o.eps, prec);
    if (auto hit = cache.load(key)) return *hit;
    ZeroSet zs;
    if (prec > 53) {
        PrecisionGuard guard(prec);
        FindOptions fo;
        fo.eps = o.eps;
        zs = ZeroFinder<BigFloat>(G, idx, k, fo).run();
    } else {
        zs = find_zeros(G, idx, k, o.eps);
    }
    cache.store(key, zs);
    return zs;
}

std::vector<ZeroSet> sweep_sets(const CommonOpts& o, const CongruenceGroup& G, int kmin,
                                int kmax) {
    std::vector<std::pair<SeriesIndex, int>> jobs;
    for (int k = kmin; k <= kmax; ++k) {
        if (k % 2) continue;
        for (int64_t A = 0; A < G.N; ++A)
            for (int64_t B = 0; B < G.N; ++B) jobs.push_back({SeriesIndex(A, B, G.N), k});
    }
    std::vector<ZeroSet> out(jobs.size());
    parallel_for(jobs.size(),
                 [&](size_t i) { out[i] = cached_find_zeros(o, G, jobs[i].first, jobs[i].second); },
                 o.threads);
    return out;
}

int cmd_kappa(const CommonOpts& o, bool all_ab) {
    auto G = make_group(o);
    std::ofstream f;
    auto& os = output(o, f);
    os << "family\tN\tv\tkappa\twitness_j\trho\n";
    if (all_ab) {
        for (int64_t A = 0; A < G.N; ++A)
            for (int64_t B = 0; B < G.N; ++B) {
                auto r = kappa_ab(G, A, B);
                os << family_name(G.family) << "\t" << G.N << "\t(" << A << "," << B
                   << ")\t" << r.kappa << "\t" << r.witness_j << "\t" << r.rho_at_kappa
                   << "\n";
            }
    }
    auto rg = kappa_group(G);
    os << family_name(G.family) << "\t" << G.N << "\tgroup\t" << rg.kappa << "\t"
       << rg.witness_j << "\t" << rg.rho_at_kappa << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& o, int64_t A, int64_t B, int k, const std::string& zs,
             const std::string& method) {
    auto G = make_group(o);
    Cd z = parse_z(zs);
    auto run = [&](auto tag) {
        using R = decltype(tag);
        SeriesEvaluator<R> ev(G, SeriesIndex(A, B, o.N), k);
        Cplx<R> zz{R(z.re), R(z.im)};
        R e(o.eps);
        EvalResult<R> r;
        double kap = std::min(1.0, z.abs());
        if (method == "lattice")
            r = ev.eval_lattice(zz, e, kap);
        else if (method == "qexp")
            r = ev.eval_qexp(zz, e);
        else
            r = ev.eval(zz, e, kap);
        std::ofstream f;
        auto& os = output(o, f);
        os.precision(17);
        os << "value = " << double(r.value.re) << (double(r.value.im) < 0 ? " - " : " + ")
           << std::abs(double(r.value.im)) << "i\n"
           << "truncation_error = " << double(r.truncation_error) << "\n"
           << "rounding_slack = " << double(r.rounding_slack) << "\n"
           << "method = " << (r.method == EvalMethod::lattice ? "lattice" : "qexpansion")
           << ", t = " << r.truncation_t << "\n";
    };
    if (o.prec > 53) {
        PrecisionGuard guard(o.prec);
        run(BigFloat{});
    } else {
        run(double{});
    }
    return 0;
}

int cmd_zeros(const CommonOpts& o, int64_t A, int64_t B, int k) {
    auto G = make_group(o);
    auto zs = cached_find_zeros(o, G, SeriesIndex(A, B, o.N), k);
    std::ofstream f;
    auto& os = output(o, f);
    os << zero_set_to_json(zs).dump(1) << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o, int kmin, int kmax) {
    auto G = make_group(o);
    auto sets = sweep_sets(o, G, kmin, kmax);
    std::ofstream f;
    auto& os = output(o, f);
    os << "family,N,k,A,B,zeros,weighted\n";
    size_t total = 0;
    for (auto& zs : sets) {
        Rational w = weighted_count(zs);
        total += zs.records.size();
        os << family_name(zs.family) << "," << zs.N << "," << zs.k << "," << zs.index.A
           << "," << zs.index.B << "," << zs.records.size() << "," << rational_string(w)
           << "\n";
    }
    std::cerr << "sweep: " << total << " zero records cached under " << cache_root(o)
              << "\n";
    return 0;
}

int cmd_limitset(const CommonOpts& o, bool no_conjugates, double resolution,
                 const std::vector<std::string>& index_args) {
    auto G = make_group(o);
    ConfigOptions copt;
    copt.conjugates = !no_conjugates;
    copt.resolution = resolution;
    if (!index_args.empty()) {
        std::vector<SeriesIndex> idxs;
        for (auto& s : index_args) {
            auto comma = s.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("index must be 'A,B': " + s);
            idxs.emplace_back(std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1)),
                              o.N);
        }
        copt.indices = idxs;
    }
    auto cfg = limit_configuration(G, copt);
    std::ofstream f;
    auto& os = output(o, f);
    os << config_to_json(cfg).dump(1) << "\n";
    return 0;
}

int cmd_hausdorff(const CommonOpts& o, int kmin, int kmax) {
    auto G = make_group(o);
    auto cfg = limit_configuration(G);
    std::ofstream f;
    auto& os = output(o, f);
    os << "k,delta,resolution_error,k_delta\n";
    for (int k = kmin; k <= kmax; ++k) {
        if (k % 2) continue;
        auto sets = sweep_sets(o, G, k, k);
        auto hd = hausdorff(zero_points(sets), cfg);
        os << k << "," << hd.distance << "," << hd.resolution_error << ","
           << k * hd.distance << "\n";
    }
    return 0;
}

int cmd_discrepancy(const CommonOpts& o, int kmin, int kmax,
                    const std::string& profile_path) {
    auto G = make_group(o);
    std::ofstream f;
    auto& os = output(o, f);
    std::ofstream prof;
    if (!profile_path.empty()) {
        prof.open(profile_path);
        if (!prof) throw std::invalid_argument("cannot open profile output: " + profile_path);
        prof << "k,re,im,d,k_d,band\n";
    }
    os << "k,D,weight_used,zeros_used,axis_zeros\n";
    for (int k = kmin; k <= kmax; ++k) {
        if (k % 2) continue;
        auto sets = sweep_sets(o, G, k, k);
        auto rep = angular_discrepancy(sets, k);
        os << k << "," << rep.D << "," << rep.weight_used << "," << rep.n_zeros_used
           << "," << rep.axis_zeros << "\n";
        if (prof.is_open())
            for (auto& e : arc_distance_profile(sets))
                prof << k << "," << e.z.re << "," << e.z.im << "," << e.d << "," << e.kd
                     << "," << e.band << "\n";
    }
    return 0;
}

int cmd_audit(const CommonOpts& o, int k) {
    auto rows = cm_point_audit(o.N, k, o.eps);
    std::ofstream f;
    auto& os = output(o, f);
    os << "point,A,B,abs_value,bound,zero\n";
    for (auto& r : rows)
        os << r.point_name << "," << r.A << "," << r.B << "," << r.abs_value << ","
           << r.bound << "," << (r.flagged_zero ? 1 : 0) << "\n";
    return 0;
}

int cmd_render(const CommonOpts& o, int kmin, int kmax, bool with_config) {
    auto G = make_group(o);
    auto sets = sweep_sets(o, G, kmin, kmax);
    GeodesicConfig cfg;
    if (with_config) cfg = limit_configuration(G);
    std::ofstream f;
    auto& os = output(o, f);
    os << render_svg(sets, with_config ? &cfg : nullptr);
    return 0;
}

int cmd_report(const CommonOpts& o, int kmin, int kmax) {
    auto G = make_group(o);
    std::ofstream f;
    auto& os = output(o, f);
    int failures = 0;
    auto line = [&](const std::string& name, bool ok, const std::string& detail) {
        os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };

    // kappa section: the closed forms for the standard families
    {
        bool ok = true;
        std::ostringstream d;
        for (int64_t n = 3; n <= 12; ++n) {
            int64_t kg = kappa_group(coset_reps(Family::Principal, n)).kappa;
            ok &= kg == (n % 4 == 0 ? 2 : 1);
            int64_t k0 = kappa_group(coset_reps(Family::Gamma0, n)).kappa;
            int64_t k1 = kappa_group(coset_reps(Family::Gamma1, n)).kappa;
            ok &= k0 == n && k1 == n;
        }
        ok &= kappa_group(coset_reps(Family::Theta, 2)).kappa == 2;
        d << "Gamma(N), Gamma0, Gamma1 for N in [3,12], Lambda";
        line("kappa-tables", ok, d.str());
    }

    // valence section on the requested group
    {
        bool ok = true;
        std::ostringstream d;
        for (int k = kmin; k <= std::min(kmax, kmin + 6); k += 2) {
            Rational total = 0;
            for (auto& zs : sweep_sets(o, G, k, k)) total += weighted_count(zs);
            Rational want = Rational(k) * G.N * G.N / 12;
            if (G.family == Family::Principal && total != want) ok = false;
            d << "k=" << k << ": " << rational_string(total) << " ";
        }
        line("valence", ok, d.str());
    }

    // clustering + discrepancy trend
    if (G.family == Family::Principal && G.N % 4 != 0) {
        auto cfg = limit_configuration(G);
        auto s1 = sweep_sets(o, G, kmin, kmin);
        auto s2 = sweep_sets(o, G, kmax, kmax);
        double d1 = hausdorff(zero_points(s1), cfg).distance;
        double d2 = hausdorff(zero_points(s2), cfg).distance;
        std::ostringstream d;
        d << "delta(" << kmin << ")=" << d1 << " delta(" << kmax << ")=" << d2;
        line("hausdorff-trend", d2 < d1, d.str());
        double D1 = angular_discrepancy(s1, kmin).D;
        double D2 = angular_discrepancy(s2, kmax).D;
        std::ostringstream dd;
        dd << "D_" << kmin << "=" << D1 << " D_" << kmax << "=" << D2;
        line("discrepancy-trend", D2 < D1, dd.str());
    }

    // CM audit at k=16
    {
        auto rows = cm_point_audit(o.N, 16, 1e-12);
        bool ok = true;
        for (auto& r : rows)
            if (r.flagged_zero && r.point_name != "i" && r.point_name != "rho") ok = false;
        line("cm-audit", ok, "no zeros at the six non-elliptic CM candidates");
    }

    os << (failures ? "REPORT: FAIL\n" : "REPORT: PASS\n");
    return failures ? 2 : 0;
}

}  // namespace

// Expand "--config FILE" into the flags it contains (key=value per line,
// '#' comments) at the position where it appears.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            std::ifstream in(argv[++i]);
            if (!in) throw std::invalid_argument(std::string("cannot read config: ") + argv[i]);
            std::string line;
            while (std::getline(in, line)) {
                auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                auto eq = line.find('=');
                if (eq == std::string::npos) continue;
                auto trim = [](std::string s) {
                    size_t b = s.find_first_not_of(" \t");
                    size_t e = s.find_last_not_of(" \t");
                    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
                };
                std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
                if (key.empty()) continue;
                args.push_back("--" + key);
                if (!val.empty()) args.push_back(val);
            }
        } else {
            args.push_back(a);
        }
    }
    return args;
}

int main(int argc, char** argv) {
    CLI::App app{"Eisenstein series for congruence groups: certified evaluation, "
                 "zero sets, Kluyver invariants, limit configurations"};
    app.require_subcommand(1);

    CommonOpts o;
    int64_t A = 0, B = 0;
    int k = 8, kmin = 4, kmax = 20;
    std::string zstr = "0.0+1.2i", method = "auto";
    bool all_ab = false, no_conj = false, with_config = false;
    double resolution = 1e-3;
    std::vector<std::string> index_args;

    auto* c_kappa = app.add_subcommand("kappa", "Kluyver kappa invariants");
    add_common(c_kappa, o);
    c_kappa->add_flag("--all-ab", all_ab, "also list kappa^{a,b} for every index");

    auto* c_eval = app.add_subcommand("eval", "certified evaluation at a point");
    add_common(c_eval, o);
    c_eval->add_option("--A", A);
    c_eval->add_option("--B", B);
    c_eval->add_option("--k", k);
    c_eval->add_option("--z", zstr, "point 'x+yi'");
    c_eval->add_option("--method", method, "auto | lattice | qexp");

    auto* c_zeros = app.add_subcommand("zeros", "zero set of one series (JSON, cached)");
    add_common(c_zeros, o);
    c_zeros->add_option("--A", A);
    c_zeros->add_option("--B", B);
    c_zeros->add_option("--k", k);

    auto* c_sweep = app.add_subcommand("sweep", "zero sets over a weight range (CSV summary)");
    add_common(c_sweep, o);
    c_sweep->add_option("--kmin", kmin);
    c_sweep->add_option("--kmax", kmax);

    auto* c_limit = app.add_subcommand("limitset", "limit geodesic configuration (JSON)");
    add_common(c_limit, o);
    c_limit->add_flag("--no-conjugates", no_conj);
    c_limit->add_option("--resolution", resolution);
    c_limit->add_option("--index", index_args, "restrict to index 'A,B' (repeatable)");

    auto* c_haus = app.add_subcommand("hausdorff", "Hausdorff distance to the limit set");
    add_common(c_haus, o);
    c_haus->add_option("--kmin", kmin);
    c_haus->add_option("--kmax", kmax);

    std::string profile_path;
    auto* c_disc = app.add_subcommand("discrepancy", "angular discrepancy series");
    add_common(c_disc, o);
    c_disc->add_option("--kmin", kmin);
    c_disc->add_option("--kmax", kmax);
    c_disc->add_option("--profile", profile_path,
                       "also write the distance-to-arc profile CSV here");

    auto* c_audit = app.add_subcommand("audit", "CM-point audit table");
    add_common(c_audit, o);
    c_audit->add_option("--k", k);

    auto* c_render = app.add_subcommand("render", "SVG of zeros over the domain");
    add_common(c_render, o);
    c_render->add_option("--kmin", kmin);
    c_render->add_option("--kmax", kmax);
    c_render->add_flag("--with-config", with_config, "overlay the limit configuration");

    auto* c_report = app.add_subcommand("report", "combined pass/fail report");
    add_common(c_report, o);
    c_report->add_option("--kmin", kmin);
    c_report->add_option("--kmax", kmax);

    std::vector<std::string> args;
    try {
        args = expand_config_args(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 4;
    }
    try {
        std::vector<const char*> cargs{argv[0]};
        for (auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_kappa->parsed()) return cmd_kappa(o, all_ab);
        if (c_eval->parsed()) return cmd_eval(o, A, B, k, zstr, method);
        if (c_zeros->parsed()) return cmd_zeros(o, A, B, k);
        if (c_sweep->parsed()) return cmd_sweep(o, kmin, kmax);
        if (c_limit->parsed()) return cmd_limitset(o, no_conj, resolution, index_args);
        if (c_haus->parsed()) return cmd_hausdorff(o, kmin, kmax);
        if (c_disc->parsed()) return cmd_discrepancy(o, kmin, kmax, profile_path);
        if (c_audit->parsed()) return cmd_audit(o, k);
        if (c_render->parsed()) return cmd_render(o, kmin, kmax, with_config);
        if (c_report->parsed()) return cmd_report(o, kmin, kmax);
    } catch (const PrecisionInsufficient& e) {
        std::cerr << "precision failure: " << e.what() << "\n";
        return 3;
    } catch (const TailBoundDiverges& e) {
        std::cerr << "precision failure: " << e.what() << "\n";
        return 3;
    } catch (const BoundaryTooClose& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const UnresolvedCluster& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const LogDomainEmpty& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const ImaginaryResidual& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const KappaNotFound& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolated& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
