// s1deform: command-line front end. Every command prints a JSON report on
// stdout; file-emitting commands also write into --out.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "s1deform/errors.hpp"
#include "s1deform/report.hpp"

namespace fs = std::filesystem;
using namespace s1d;

namespace {

struct Common {
    std::string germ;
    std::string file;
    int order = 8;
    std::string out = ".";
    std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--germ", c.germ, "germ as 'f1; f2; f3' in u, v, s");
    app->add_option("--file", c.file, "file holding the germ");
    app->add_option("--order", c.order, "jet order N, 4..12")->capture_default_str();
    app->add_option("--out", c.out, "output directory")->capture_default_str();
    app->add_option("--seed", c.seed, "seed for property probes")->capture_default_str();
}

MapGerm load_germ(const Common& c) {
    if (c.germ.empty() == c.file.empty()) throw UsageError("give exactly one of --germ or --file");
    if (c.order < 4 || c.order > 12) throw UsageError("--order must be in [4, 12]");
    if (!c.germ.empty()) return parse_germ(c.germ);
    std::ifstream in(c.file);
    if (!in) throw UsageError("cannot read " + c.file);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_germ(buf.str());
}

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const char* what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw UsageError(std::string(what) + ": not a number: '" + item + "'");
        }
    }
    if (out.size() != count) throw UsageError(std::string(what) + ": expected " + std::to_string(count) + " values");
    return out;
}

void write_file(const Common& c, const std::string& name, const std::string& content) {
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / name, std::ios::binary);
    if (!f) throw UsageError("cannot write " + (fs::path(c.out) / name).string());
    f << content;
}

bool at_base_point(const Point& p) { return p.u == 0.0 && p.v == 0.0 && p.s == 0.0; }

Json cmd_analyze(const Common& c, const std::string& point_text, double s) {
    const MapGerm f = load_germ(c);
    const auto uv = parse_numbers(point_text, 2, "--point");
    const Point p{uv[0], uv[1], s};
    const LocalDerivatives d = local_derivatives(f, p);
    const int rank = rank_at(d);
    Json r = {{"command", "analyze"},
              {"germ", to_string(f)},
              {"point", Json::array({p.u, p.v, p.s})},
              {"rank", rank},
              {"forms", to_json(form_bundle(d))}};
    if (rank == 2) {
        r["status"] = "regular";
        r["message"] = "no singular point: df has rank 2";
        return r;
    }
    if (rank == 0) {
        r["status"] = "rank-0";
        r["message"] = "df vanishes; outside the scope of the pointwise invariants";
        return r;
    }
    const bool umbrella = whitney_test(d);
    r["status"] = "singular";
    r["whitney_test"] = umbrella;
    r["null_vector"] = {null_vector(d)(0), null_vector(d)(1)};
    r["parabola"] = to_json(curvature_parabola(d));
    r["conic"] = to_json(focal_conic(d));
    if (umbrella) {
        const auto ur = umbrella_invariants(d);
        r["invariants"] = to_json(ur.inv);
        r["scalars"] = to_json(ur.scalars);
        r["classification"] = {{"kind", "umbrella"}};
    }
    if (!umbrella && at_base_point(p)) {
        const auto adm = admissibility_check(f, c.order);
        r["admissibility"] = to_json(adm);
        if (adm.pass) {
            const NormalFormData nf = reduce_normalized(f, c.order);
            r["classification"] = to_json(classify(nf));
            r["coefficients"] = to_json(scalar_coefficients(nf));
        }
    }
    return r;
}

double max_coefficient_gap(const CoefficientSet& a, const CoefficientSet& b) {
    const Json ja = to_json(a);
    const Json jb = to_json(b);
    double gap = 0.0;
    for (auto it = ja.begin(); it != ja.end(); ++it) {
        if (!it->is_number_float()) continue;
        gap = std::max(gap, std::abs(it->get<double>() - jb.at(it.key()).get<double>()));
    }
    return gap;
}

Json cmd_normal_form(const Common& c, int probe) {
    const MapGerm f = load_germ(c);
    bool generic = false;
    const NormalFormData nf = reduce_normalized(f, c.order, &generic);
    const CoefficientSet cs = scalar_coefficients(nf);
    Json r = {{"command", "normal-form"},
              {"germ", to_string(f)},
              {"admissibility", to_json(admissibility_check(f, c.order))},
              {"normal_form", to_json(nf)},
              {"coefficients", to_json(cs)},
              {"classification", to_json(classify(nf))},
              {"monomials", to_json(monomial_coefficients(nf))},
              {"generic", generic}};
    if (generic && !cs.c2_degenerate) {
        const DeformationModel m = make_model(f, c.order);
        r["locus_expansion"] = to_json(locus_expansion(m));
        r["trajectory"] = to_json(trajectory_geometry(m));
    }
    if (probe > 0) {
        std::mt19937_64 rng(c.seed);
        double gap = 0.0;
        for (int i = 0; i < probe; ++i) {
            const DiffeoSpec phi = random_diffeo(rng);
            const Mat3 rot = random_rotation(rng);
            const MapGerm g = apply_equivalence(f, phi, rot);
            gap = std::max(gap, max_coefficient_gap(cs, scalar_coefficients(reduce_normalized(g, c.order))));
        }
        r["probe"] = {{"count", probe}, {"seed", c.seed}, {"max_coefficient_gap", gap}};
    }
    return r;
}

Json cmd_trace(const Common& c, const std::string& grid_text) {
    const MapGerm f = load_germ(c);
    if (f.kind != GermKind::Deformation) throw UsageError("trace needs a deformation (an expression in s)");
    const GeometricGrid grid = parse_grid(grid_text);
    DeformationModel m = make_model(f, c.order, false);
    Json r = {{"command", "trace"}, {"germ", to_string(f)}};
    TraceTable table{grid, {}};
    if (!m.generic) {
        // No locus expansion without dF33/ds; only an empty locus can be reported.
        for (double st : grid.values()) {
            if (!singular_locus(m, -m.epsilon * st * st).empty()) {
                throw DegeneracyError("deformation is not generic: dF33/ds(0,0) = 0");
            }
        }
        r["note"] = "no singular points at any grid value";
    } else {
        m = make_model(f, c.order);
        table = trace(m, grid);
        r["coefficients"] = to_json(m.cs);
        r["classification"] = to_json(m.cls);
        r["locus_expansion"] = to_json(locus_expansion(m));
    }
    const bool complete = !table.rows.empty() && std::all_of(table.rows.begin(), table.rows.end(), [](const TraceRow& row) {
        return row.found && std::isfinite(row.plus.a02);
    });
    r["empty"] = std::none_of(table.rows.begin(), table.rows.end(), [](const TraceRow& row) { return row.found; });
    r["table"] = to_json(table);
    if (complete && table.rows.size() >= 4) {
        r["asymptotics"] = to_json(asymptotic_limits(table, m.cs));
    } else {
        r["asymptotics"] = nullptr;
    }
    write_file(c, "trace.csv", trace_csv(table));
    write_file(c, "trace.json", dump(r));
    return r;
}

Json cmd_focal(const Common& c, double s) {
    const MapGerm f = load_germ(c);
    // Keeps the input parameter: s here is the user's s.
    const DeformationModel m = make_model(f, c.order, false);
    const auto recs = singular_locus(m, s, 10.0);
    Json points = Json::array();
    const SingularPointRecord* chosen = nullptr;
    for (const auto& rec : recs) {
        if (rank_at(local_derivatives(m.poly, rec.point)) != 1) continue;
        points.push_back(to_json(rec));
        if (!chosen || rec.point.u > chosen->point.u) chosen = &rec;
    }
    if (!chosen) throw DomainError("no rank-1 singular point at s = " + format_double(s));
    const FocalConic fc = focal_conic(local_derivatives(m.poly, chosen->point));
    Json r = {{"command", "focal"},
              {"germ", to_string(f)},
              {"s", s},
              {"points", points},
              {"selected", to_json(*chosen)},
              {"conic", to_json(fc)}};
    write_file(c, "focal.svg", focal_svg(fc));
    write_file(c, "focal.json", dump(r));
    return r;
}

Json cmd_gauss(const Common& c, double s_tilde, int n_theta, int n_k, bool search) {
    const MapGerm f = load_germ(c);
    const DeformationModel m = make_model(f, c.order);
    const GaussProbeReport g = gauss_sign_probe(m, s_tilde, n_theta, n_k, search);
    return {{"command", "gauss-probe"}, {"germ", to_string(f)}, {"coefficients", to_json(m.cs)}, {"probe", to_json(g)}};
}

Json cmd_mesh(const Common& c, double s, const std::string& range, const std::string& resolution, bool k_sign) {
    const MapGerm f = load_germ(c);
    const auto box = parse_numbers(range, 4, "--range");
    const auto res = std::count(resolution.begin(), resolution.end(), ',') == 0
                         ? parse_numbers(resolution + "," + resolution, 2, "--resolution")
                         : parse_numbers(resolution, 2, "--resolution");
    MeshGrid g{box[0], box[1], box[2], box[3], static_cast<int>(res[0]), static_cast<int>(res[1])};
    if (res[0] != g.nu || res[1] != g.nv) throw UsageError("--resolution takes integers");
    const Mesh mesh = mesh_parallel(f, s, g);
    write_file(c, "mesh.obj", mesh_obj(mesh));
    Json files = Json::array({"mesh.obj"});
    if (k_sign) {
        write_file(c, "k_sign.txt", k_sign_text(mesh));
        files.push_back("k_sign.txt");
    }
    const auto count = [&mesh](int v) { return std::count(mesh.k_sign.begin(), mesh.k_sign.end(), v); };
    return {{"command", "mesh"},
            {"germ", to_string(f)},
            {"s", s},
            {"vertices", mesh.vertices.size()},
            {"faces", mesh.faces.size()},
            {"k_sign_counts", {{"negative", count(-1)}, {"zero", count(0)}, {"positive", count(1)}}},
            {"files", files}};
}

int fail(const char* kind, const std::string& message, int code) {
    std::cout << dump({{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}});
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normal forms and deformation invariants of S1 map germs"};
    app.require_subcommand(1);
    Common common;

    std::string point = "0,0";
    double s = 0.0;
    auto* analyze = app.add_subcommand("analyze", "rank, Whitney test and invariants at a point");
    add_common(analyze, common);
    analyze->add_option("--point", point, "source point u,v")->capture_default_str();
    analyze->add_option("--s", s, "parameter value")->capture_default_str();

    int probe = 0;
    auto* nform = app.add_subcommand("normal-form", "SO(3) normal form and coefficient set");
    add_common(nform, common);
    nform->add_option("--probe", probe, "random equivalences to check invariance against");

    std::string grid = "0.1:0.5:7";
    auto* tr = app.add_subcommand("trace", "umbrella invariants along the singular locus");
    add_common(tr, common);
    tr->add_option("--s-tilde-grid", grid, "geometric grid start:ratio:n")->capture_default_str();

    auto* focal = app.add_subcommand("focal", "focal conic at a singular point");
    add_common(focal, common);
    focal->add_option("--s", s, "parameter value")->capture_default_str();

    double s_tilde = 0.05;
    int n_theta = 16;
    int n_k = 8;
    bool search = false;
    auto* gauss = app.add_subcommand("gauss-probe", "sign of the Gaussian curvature near the umbrellas");
    add_common(gauss, common);
    gauss->add_option("--s-tilde", s_tilde, "sqrt|s|")->capture_default_str();
    gauss->add_option("--n-theta", n_theta, "angular samples")->capture_default_str();
    gauss->add_option("--n-k", n_k, "radial samples")->capture_default_str();
    gauss->add_flag("--search", search, "bisect for the largest s_tilde with full agreement");

    std::string range = "-1,1,-1,1";
    std::string resolution = "50";
    bool k_sign = false;
    auto* mesh = app.add_subcommand("mesh", "triangulated surface at fixed s");
    add_common(mesh, common);
    mesh->add_option("--s", s, "parameter value")->capture_default_str();
    mesh->add_option("--range", range, "u0,u1,v0,v1")->capture_default_str();
    mesh->add_option("--resolution", resolution, "n or nu,nv")->capture_default_str();
    mesh->add_flag("--k-sign", k_sign, "also write per-vertex sign of K");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        Json r;
        if (*analyze) r = cmd_analyze(common, point, s);
        if (*nform) r = cmd_normal_form(common, probe);
        if (*tr) r = cmd_trace(common, grid);
        if (*focal) r = cmd_focal(common, s);
        if (*gauss) r = cmd_gauss(common, s_tilde, n_theta, n_k, search);
        if (*mesh) r = cmd_mesh(common, s, range, resolution, k_sign);
        std::cout << dump(r);
        return 0;
    } catch (const ParseError& e) {
        std::cout << dump({{"error",
                            {{"kind", "parse"},
                             {"message", e.what()},
                             {"line", e.line()},
                             {"column", e.column()},
                             {"exit_code", e.exit_code()}}}});
        return e.exit_code();
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), e.exit_code());
    } catch (const std::exception& e) {
        return fail("internal-consistency", e.what(), 4);
    }
}
