#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polywave/csv.hpp"
#include "polywave/evolution.hpp"
#include "polywave/heat.hpp"
#include "polywave/littlewood_paley.hpp"

namespace fs = std::filesystem;
using namespace polywave;

namespace {

struct Options {
    std::string surface;
    std::string output = "polywave-out";
    std::string bc = "both";
    std::string solver = "auto";
    double h = 0.02;
    double grade = 0.0; // 0: derived from the surface
    double min_angle = 25.0;
    int modes = 200;
    bool cones_dirichlet = false;
    std::uint64_t seed = 7;
};

/// Records produced files and writes the manifest on every exit path.
class Manifest {
public:
    Manifest(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}
    ~Manifest() { write(); }

    void add(const fs::path& file, const std::string& schema, int version, std::size_t rows) {
        files_.push_back({{"file", file.filename().string()}, {"schema", schema}, {"schema_version", version},
                          {"rows", rows}});
    }
    void set_config(nlohmann::ordered_json c) { config_ = std::move(c); }
    void fail(const std::string& message) {
        partial_ = true;
        error_ = message;
    }
    void complete() { complete_ = true; }

    void write() const {
        try {
            fs::create_directories(dir_);
            nlohmann::ordered_json m;
            m["manifest_version"] = 1;
            m["command"] = command_;
            m["config"] = config_;
            m["partial"] = partial_ || !complete_;
            if (!error_.empty()) m["error"] = error_;
            m["files"] = files_;
            std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
            out << m.dump(2) << '\n';
        } catch (...) {
        }
    }

private:
    fs::path dir_;
    std::string command_;
    nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json files_ = nlohmann::ordered_json::array();
    bool partial_ = false;
    bool complete_ = false;
    std::string error_;
};

/// Exclusive advisory lock on a file in the cache directory.
class CacheLock {
public:
    explicit CacheLock(const fs::path& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw InputError("cannot open cache lock " + path.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw InputError("cannot lock " + path.string());
        }
    }
    ~CacheLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    CacheLock(const CacheLock&) = delete;
    CacheLock& operator=(const CacheLock&) = delete;

private:
    int fd_ = -1;
};

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t text_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

fs::path cache_dir() {
    const char* env = std::getenv("POLYWAVE_CACHE");
    fs::path dir = env && *env ? fs::path(env) : fs::path(".polywave-cache");
    fs::create_directories(dir);
    return dir;
}

/// Writes through a temporary file so readers never see half a cache entry.
template <class Save>
void atomic_save(const fs::path& path, Save&& save) {
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    save(tmp.string());
    fs::rename(tmp, path);
}

BasisParity parity_of(const Options& o) {
    if (o.solver == "full") return BasisParity::full;
    if (o.solver != "auto" && o.solver != "split") throw InputError("--solver must be auto, split or full");
    if (o.bc == "dirichlet") return BasisParity::odd;
    if (o.bc == "neumann") return BasisParity::even;
    if (o.bc == "both") return BasisParity::split;
    throw InputError("--bc must be dirichlet, neumann or both");
}

struct Context {
    Options opt;
    PolygonSpec poly;
    SurfaceSpec spec;
    MeshParams params;
    SurfaceMesh mesh;
    std::uint64_t mesh_hash = 0;

    explicit Context(const Options& o) : opt(o) {
        if (opt.surface.empty()) throw InputError("--surface is required");
        if (!fs::exists(opt.surface)) throw InputError("surface file not found: " + opt.surface);
        poly = load_polygon(opt.surface);
        spec = double_polygon(poly);
        params.h = opt.h;
        if (opt.grade != 0.0) params.grade = opt.grade;
        params.min_angle = opt.min_angle;
        params.validate();
    }

    std::string surface_name() const { return poly.name.empty() ? fs::path(opt.surface).stem().string() : poly.name; }

    SurfaceMesh load_or_build_mesh(double h, std::uint64_t* hash_out) {
        MeshParams p = params;
        p.h = h;
        std::ostringstream key;
        key << format_polygon(poly) << "|h=" << format_number(p.h) << "|grade=" << format_number(p.grade_for(spec))
            << "|angle=" << format_number(p.min_angle) << "|seed=" << p.seed;
        const fs::path dir = cache_dir();
        const fs::path file = dir / ("mesh-" + hex(text_hash(key.str())) + ".bin");
        CacheLock lock(dir / "cache.lock");
        SurfaceMesh m;
        if (fs::exists(file)) {
            m = load_mesh(file.string());
        } else {
            m = triangulate(spec, p);
            atomic_save(file, [&](const std::string& path) { save_mesh(m, path); });
        }
        if (hash_out) *hash_out = file_hash(file.string());
        return m;
    }

    void load_mesh_only() { mesh = load_or_build_mesh(opt.h, &mesh_hash); }

    SpectralBasis load_or_build_basis(const SurfaceMesh& m, std::uint64_t mhash, int count) {
        const BasisParity parity = parity_of(opt);
        std::ostringstream key;
        key << hex(mhash) << "|parity=" << static_cast<int>(parity) << "|cones=" << opt.cones_dirichlet
            << "|count=" << count;
        const fs::path dir = cache_dir();
        const fs::path file = dir / ("basis-" + hex(text_hash(key.str())) + ".bin");
        CacheLock lock(dir / "cache.lock");
        if (fs::exists(file)) {
            SpectralBasis b = load_basis(file.string());
            if (b.count() == count) return b;
        }
        EigenbasisOptions eo;
        eo.parity = parity;
        const DiscreteOperators ops = assemble(m, opt.cones_dirichlet);
        SpectralBasis b = eigenbasis(m, ops, count, eo);
        atomic_save(file, [&](const std::string& path) { save_basis(b, path); });
        return b;
    }

    /// Basis on the working mesh with the trusted ceiling from a second mesh at h * sqrt(2).
    SpectralBasis trusted_basis() {
        load_mesh_only();
        SpectralBasis fine = load_or_build_basis(mesh, mesh_hash, opt.modes);
        std::uint64_t coarse_hash = 0;
        const double hc = opt.h * std::sqrt(2.0);
        const SurfaceMesh coarse_mesh = load_or_build_mesh(hc, &coarse_hash);
        const SpectralBasis coarse = load_or_build_basis(coarse_mesh, coarse_hash, opt.modes);
        mark_trusted(fine, coarse, opt.h, hc);
        return fine;
    }
};

nlohmann::ordered_json config_json(const Options& o) {
    return {{"surface", o.surface}, {"h", o.h},       {"grade", o.grade}, {"min_angle", o.min_angle},
            {"modes", o.modes},     {"bc", o.bc},     {"solver", o.solver}, {"cones_dirichlet", o.cones_dirichlet},
            {"seed", o.seed},       {"output", o.output}};
}

std::ofstream open_csv(const Options& o, const std::string& name) {
    fs::create_directories(o.output);
    std::ofstream out(fs::path(o.output) / name, std::ios::trunc);
    if (!out) throw InputError("cannot write " + (fs::path(o.output) / name).string());
    return out;
}

const char* parity_label(std::int8_t p) { return p > 0 ? "even" : p < 0 ? "odd" : "unknown"; }

void run_double(const Options& o, Manifest& man) {
    Context ctx(o);
    auto out = open_csv(o, "cone_points.csv");
    CsvWriter w(out, "cone_points", 1, {"surface", "vertex", "ring", "x", "y", "alpha", "rho"});
    for (std::size_t i = 0; i < ctx.spec.cone_points.size(); ++i) {
        const auto& c = ctx.spec.cone_points[i];
        w.row({ctx.surface_name(), static_cast<std::int64_t>(i), static_cast<std::int64_t>(c.ring), c.location.x,
               c.location.y, c.alpha, c.rho});
    }
    man.add("cone_points.csv", w.schema(), w.version(), w.rows());
    std::cout << "surface " << ctx.surface_name() << ": " << ctx.spec.cone_points.size() << " cone points, area "
              << format_number(ctx.spec.total_area) << ", euler characteristic " << ctx.spec.euler_characteristic()
              << ", curvature sum / 2pi " << format_number(ctx.spec.curvature_sum() / (2.0 * M_PI)) << '\n';
}

void run_mesh(const Options& o, Manifest& man) {
    Context ctx(o);
    ctx.load_mesh_only();
    const MeshStats s = mesh_stats(ctx.mesh);
    auto out = open_csv(o, "mesh_stats.csv");
    CsvWriter w(out, "mesh_stats", 1,
                {"surface", "h", "grade", "vertices", "triangles", "seam_vertices", "min_angle", "max_edge", "min_edge",
                 "total_area", "mesh_hash"});
    w.row({ctx.surface_name(), o.h, ctx.params.grade_for(ctx.spec), static_cast<std::int64_t>(s.vertices),
           static_cast<std::int64_t>(s.triangles), static_cast<std::int64_t>(s.seam_vertices), s.min_angle_deg,
           s.max_edge, s.min_edge, s.total_area, hex(ctx.mesh_hash)});
    man.add("mesh_stats.csv", w.schema(), w.version(), w.rows());
    std::cout << s.vertices << " vertices, " << s.triangles << " triangles, min angle " << format_number(s.min_angle_deg)
              << '\n';
}

void run_eigs(const Options& o, Manifest& man) {
    Context ctx(o);
    SpectralBasis b = ctx.trusted_basis();
    auto out = open_csv(o, "eigenvalues.csv");
    CsvWriter w(out, "eigenvalues", 1,
                {"surface", "index", "frequency", "eigenvalue", "parity", "residual", "trusted"});
    for (Eigen::Index j = 0; j < b.count(); ++j)
        w.row({ctx.surface_name(), static_cast<std::int64_t>(j), b.frequencies[j], b.eigenvalues[j],
               std::string(b.parity.empty() ? "unknown" : parity_label(b.parity[j])), b.residuals[j],
               static_cast<std::int64_t>(static_cast<std::size_t>(j) < b.trusted_count)});
    man.add("eigenvalues.csv", w.schema(), w.version(), w.rows());
    std::cout << b.count() << " modes, " << b.trusted_count << " trusted up to frequency "
              << format_number(b.max_trusted_frequency()) << '\n';
}

void run_squarefn(const Options& o, Manifest& man, double q, double cutoff_frequency, int samples) {
    Context ctx(o);
    SpectralBasis b = ctx.trusted_basis();
    const double cut = cutoff_frequency > 0.0 ? cutoff_frequency : 0.5 * b.max_trusted_frequency();
    const LqQuadrature quad(ctx.mesh);
    const auto ratios = squarefunction_ensemble(b, quad, q, cut, samples, o.seed);
    auto out = open_csv(o, "squarefunction.csv");
    write_squarefunction_csv(out, ctx.surface_name(), q, cut, ratios);
    man.add("squarefunction.csv", "squarefunction", 1, ratios.size());
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    std::cout << "ratio range [" << format_number(*lo) << ", " << format_number(*hi) << "]\n";
}

struct EvolveOptions {
    double p = 4.0;
    double q = 0.0;
    int kmin = 2;
    int kmax = 6;
    double T = 1.0;
    int samples = 32;
    std::string ensemble = "mixed";
    bool mixed_bands = false;
};

AdmissiblePair pair_of(const EvolveOptions& e) {
    AdmissiblePair a = e.q > 0.0 ? AdmissiblePair{e.p, e.q} : AdmissiblePair::from_p(e.p);
    a.validate();
    return a;
}

void run_evolution(const Options& o, Manifest& man, const EvolveOptions& e, bool strichartz) {
    const AdmissiblePair pair = pair_of(e);
    if (e.kmin < 0 || e.kmax < e.kmin) throw InputError("need 0 <= kmin <= kmax");
    Context ctx(o);
    SpectralBasis b = ctx.trusted_basis();
    const LqQuadrature quad(ctx.mesh);
    Ensemble ens;
    ens.samples = e.samples;
    ens.seed = o.seed;
    ens.kind = parse_ensemble_kind(e.ensemble);
    std::vector<StrichartzRow> rows;
    std::vector<int> ks;
    std::vector<double> maxima;
    for (int k = e.kmin; k <= e.kmax; ++k) {
        std::vector<SampleResult> res;
        double T = e.T;
        if (!strichartz) {
            res = dyadic_experiment(b, quad, k, pair, ens);
            T = std::ldexp(1.0, -k);
        } else if (e.mixed_bands) {
            res = mixed_band_strichartz(b, quad, k, pair, e.T, ens);
        } else {
            res = dyadic_strichartz(b, quad, k, pair, e.T, ens);
        }
        double mx = 0.0;
        for (std::size_t s = 0; s < res.size(); ++s) {
            rows.push_back({k, T, static_cast<int>(s), res[s]});
            mx = std::max(mx, res[s].ratio);
        }
        ks.push_back(k);
        maxima.push_back(mx);
        std::cout << "k = " << k << ": max ratio " << format_number(mx) << '\n';
    }
    const std::string name = strichartz ? "strichartz.csv" : "evolve.csv";
    auto out = open_csv(o, name);
    const std::string bc = o.bc + (o.cones_dirichlet ? "+cones" : "");
    write_strichartz_csv(out, ctx.surface_name(), bc, pair, o.seed, rows);
    man.add(name, "strichartz", 1, rows.size());
    if (ks.size() >= 2) std::cout << "slope of log(max ratio) in k: " << format_number(log_slope(ks, maxima)) << '\n';
}

struct HeatOptions {
    std::size_t cone = 0;
    std::vector<double> radii{0.1};
    std::vector<double> times;
    std::string rule = "averaged";
    double gaussian_b = 0.0;
    int points = 8;
};

void run_heat(const Options& o, Manifest& man, const HeatOptions& hopt) {
    Context ctx(o);
    SpectralBasis b = ctx.trusted_basis();
    PointMassRule rule;
    if (hopt.rule == "averaged") rule = PointMassRule::averaged;
    else if (hopt.rule == "display") rule = PointMassRule::display;
    else throw InputError("--rule must be averaged or display");
    std::vector<double> times = hopt.times;
    if (times.empty()) {
        const double t0 = min_trusted_time(b);
        times = {t0, 2 * t0, 4 * t0, 8 * t0};
    }
    const auto rows = cheeger_compare(b, ctx.mesh, ctx.spec, hopt.cone, hopt.radii, times, rule);
    auto out = open_csv(o, "heat.csv");
    write_heat_csv(out, rows);
    man.add("heat.csv", "heat", 1, rows.size());
    for (const auto& r : rows)
        std::cout << "r = " << format_number(r.r) << ", t = " << format_number(r.t)
                  << ": relative deviation " << format_number(r.rel_dev) << '\n';
    if (hopt.gaussian_b > 0.0) {
        std::mt19937_64 rng(o.seed);
        std::uniform_int_distribution<Eigen::Index> pick(0, b.vertex_count() - 1);
        std::vector<Eigen::Index> pts;
        for (int i = 0; i < hopt.points; ++i) pts.push_back(pick(rng));
        const auto rep = gaussian_bound_check(b, ctx.mesh, ctx.poly, pts, times, hopt.gaussian_b);
        auto gout = open_csv(o, "gaussian_bound.csv");
        CsvWriter w(gout, "gaussian_bound", 1, {"x", "y", "t", "distance", "kernel", "ratio"});
        for (const auto& r : rep.rows)
            w.row({static_cast<std::int64_t>(r.x), static_cast<std::int64_t>(r.y), r.t, r.distance, r.kernel, r.ratio});
        man.add("gaussian_bound.csv", w.schema(), w.version(), w.rows());
        std::cout << "empirical Gaussian constant " << format_number(rep.c_emp)
                  << (rep.exact_distances ? "" : " (graph distances)") << '\n';
    }
}

void run_report(const Options& o) {
    const fs::path file = fs::path(o.output) / "manifest.json";
    if (!fs::exists(file)) throw InputError("no manifest in " + o.output);
    std::ifstream in(file);
    nlohmann::ordered_json m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("unreadable manifest: ") + e.what());
    }
    std::cout << "command: " << m.value("command", "?") << (m.value("partial", true) ? " (partial)" : "") << '\n';
    if (m.contains("error")) std::cout << "error: " << m["error"].get<std::string>() << '\n';
    for (const auto& f : m["files"])
        std::cout << "  " << f["file"].get<std::string>() << "  schema " << f["schema"].get<std::string>() << " v"
                  << f["schema_version"].get<int>() << ", " << f["rows"].get<std::size_t>() << " rows\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral experiments on doubled polygons"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_flag("--help", "print this help and exit");
    app.set_config("--config", "", "key=value configuration file; flags override it");
    Options o;
    app.add_option("--surface", o.surface, "polygon file");
    app.add_option("--output", o.output, "output directory");
    app.add_option("--h", o.h, "target edge length");
    app.add_option("--grade", o.grade, "grading exponent in (0, 1]; default from the cone radii");
    app.add_option("--min-angle", o.min_angle, "minimum triangle angle in degrees");
    app.add_option("--modes", o.modes, "number of eigenpairs");
    app.add_option("--bc", o.bc, "dirichlet, neumann or both (the doubled surface)");
    app.add_option("--solver", o.solver, "auto (parity blocks) or full (unreduced problem)");
    app.add_flag("--cones-dirichlet", o.cones_dirichlet, "eliminate the cone vertices");
    app.add_option("--seed", o.seed, "random seed");

    auto* dbl = app.add_subcommand("double", "cone points of the doubled polygon");
    auto* msh = app.add_subcommand("mesh", "triangulate the doubled surface");
    auto* eig = app.add_subcommand("eigs", "eigenpairs and trusted frequencies");

    double sq_q = 4.0, sq_cut = 0.0;
    int sq_samples = 64;
    auto* sqf = app.add_subcommand("squarefn", "square function ratios over random states");
    sqf->add_option("--q", sq_q, "exponent in (1, inf)");
    sqf->add_option("--cutoff", sq_cut, "frequency cutoff (default half the trusted range)");
    sqf->add_option("--samples", sq_samples, "ensemble size");

    EvolveOptions ev, st;
    auto add_evolve = [](CLI::App* sub, EvolveOptions& e) {
        sub->add_option("--p", e.p, "time exponent p > 2");
        sub->add_option("--q", e.q, "space exponent (default from 2/p + 2/q = 1)");
        sub->add_option("--kmin", e.kmin, "first band");
        sub->add_option("--kmax", e.kmax, "last band");
        sub->add_option("--samples", e.samples, "ensemble size");
        sub->add_option("--ensemble", e.ensemble, "gaussian, localized or mixed");
    };
    auto* evo = app.add_subcommand("evolve", "band-limited evolution over one dyadic time interval");
    add_evolve(evo, ev);
    auto* stz = app.add_subcommand("strichartz", "Strichartz ratios on [-T, T]");
    add_evolve(stz, st);
    stz->add_option("--T", st.T, "half-length of the time interval");
    stz->add_flag("--mixed-bands", st.mixed_bands, "data spread over bands 0..k, ratio against H^(1/p)");

    HeatOptions ho;
    auto* hea = app.add_subcommand("heat", "spectral heat kernel against the cone kernel");
    hea->add_option("--cone", ho.cone, "cone point index");
    hea->add_option("--radii", ho.radii, "distances from the cone point");
    hea->add_option("--times", ho.times, "times (default: a ladder from the smallest trusted t)");
    hea->add_option("--rule", ho.rule, "point mass at y = pi: averaged or display");
    hea->add_option("--gaussian-b", ho.gaussian_b, "also check the Gaussian bound with this b");
    hea->add_option("--points", ho.points, "sample vertices for the Gaussian bound");

    auto* rep = app.add_subcommand("report", "summarize the manifest of an output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*rep) {
        try {
            run_report(o);
            return 0;
        } catch (const InputError& e) {
            std::cerr << "input error: " << e.what() << '\n';
            return 2;
        }
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Manifest man(o.output, command);
    auto cfg = config_json(o);
    man.set_config(cfg);
    try {
        if (*dbl) run_double(o, man);
        else if (*msh) run_mesh(o, man);
        else if (*eig) run_eigs(o, man);
        else if (*sqf) run_squarefn(o, man, sq_q, sq_cut, sq_samples);
        else if (*evo) run_evolution(o, man, ev, false);
        else if (*stz) run_evolution(o, man, st, true);
        else if (*hea) run_heat(o, man, ho);
        man.complete();
        return 0;
    } catch (const InputError& e) {
        man.fail(e.what());
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        man.fail(e.what());
        std::cerr << "numerical error in module " << e.module() << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        man.fail(e.what());
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
