// Command-line front end: mesh generation, benchmark runs, and report
// aggregation. Exit codes: 0 success, 1 config error, 2 solver error,
// 3 report error.

#include "polyelast/benchmarks.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace polyelast;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt17(*v) : ""; }

std::string result_csv(const bench::BenchmarkResult& res) {
    std::ostringstream out;
    out << "level,param,dofs,h,l2_rel,h1_rel,K_I,K_II,F_I,F_II,rate_l2,rate_h1\n";
    const auto rate = [&](const char* key) {
        auto it = res.rates.find(key);
        return it == res.rates.end() ? std::string() : fmt17(it->second);
    };
    for (const auto& lv : res.levels) {
        out << lv.level << ',' << lv.param << ',' << lv.dofs << ',' << fmt17(lv.h) << ','
            << opt_field(lv.l2) << ',' << opt_field(lv.h1) << ',' << opt_field(lv.K_I) << ','
            << opt_field(lv.K_II) << ',' << opt_field(lv.F_I) << ',' << opt_field(lv.F_II) << ','
            << rate("l2") << ',' << rate("h1") << '\n';
    }
    return out.str();
}

json result_json(const bench::BenchmarkResult& res) {
    json j;
    j["case"] = res.case_name;
    j["formulation"] = res.formulation;
    j["p"] = res.p;
    j["pass"] = res.pass;
    j["rates"] = res.rates;
    j["levels"] = json::array();
    for (const auto& lv : res.levels) {
        json l;
        l["level"] = lv.level;
        l["param"] = lv.param;
        l["dofs"] = lv.dofs;
        l["h"] = lv.h;
        if (lv.l2) l["l2_rel"] = *lv.l2;
        if (lv.h1) l["h1_rel"] = *lv.h1;
        if (lv.K_I) l["K_I"] = *lv.K_I;
        if (lv.K_II) l["K_II"] = *lv.K_II;
        if (lv.F_I) l["F_I"] = *lv.F_I;
        if (lv.F_II) l["F_II"] = *lv.F_II;
        j["levels"].push_back(l);
    }
    j["checks"] = json::array();
    for (const auto& ch : res.checks) {
        j["checks"].push_back({{"name", ch.name},
                               {"value", ch.value},
                               {"op", ch.op},
                               {"target", ch.target},
                               {"tol", ch.tol},
                               {"pass", ch.pass}});
    }
    return j;
}

struct CommonOpts {
    std::string case_name = "patch";
    std::string formulation = "sbfem";
    int p = 1;
    int levels = 0;
    std::uint64_t seed = 823543;
    std::string out_dir = "out";
    std::string fixtures_path;
    std::vector<std::string> formats = {"csv", "json"};
};

json fixtures_or_default(const CommonOpts& o) {
    return o.fixtures_path.empty() ? bench::default_fixtures()
                                   : bench::load_fixtures(o.fixtures_path);
}

std::string run_tag(const bench::BenchmarkResult& r) {
    return r.case_name + "-" + r.formulation + "-p" + std::to_string(r.p);
}

int cmd_mesh(const CommonOpts& o) {
    const json fixtures = fixtures_or_default(o);
    bench::BenchmarkCase c;
    c.name = o.case_name;
    c.formulation = bench::formulation_from_name(o.formulation);
    c.p = o.p;
    c.seed = o.seed;
    c.fixtures = fixtures;

    fs::create_directories(o.out_dir);
    const json& geo = fixtures.at("geometry");
    std::vector<PolygonMesh> meshes;
    if (o.case_name == "patch" || o.case_name == "cantilever" || o.case_name == "plate-hole") {
        const std::string key = o.case_name == "plate-hole" ? "plate_hole" : o.case_name;
        std::vector<int> levels = geo.at(key).at("levels").get<std::vector<int>>();
        if (o.levels > 0 && static_cast<int>(levels.size()) > o.levels)
            levels.resize(static_cast<size_t>(o.levels));
        for (size_t i = 0; i < levels.size(); ++i) {
            const std::uint64_t seed = o.seed + i;
            if (o.case_name == "patch") {
                meshes.push_back(bench::patch_mesh(levels[i], seed));
            } else if (o.case_name == "cantilever") {
                bench::CantileverParams p;
                meshes.push_back(bench::cantilever_mesh(p, levels[i], seed));
            } else {
                meshes.push_back(bench::plate_hole_mesh(geo.at(key).at("size"),
                                                        geo.at(key).at("hole_radius"), levels[i],
                                                        seed));
            }
        }
    } else {
        throw CLI::ValidationError("--case", "mesh generation supports patch, cantilever, plate-hole");
    }
    for (size_t i = 0; i < meshes.size(); ++i) {
        const fs::path path =
            fs::path(o.out_dir) / (o.case_name + "-level" + std::to_string(i) + ".json");
        write_atomic(path, mesh_to_json(meshes[i]));
        std::cout << path.string() << ": " << meshes[i].elements.size() << " elements, "
                  << meshes[i].nodes.size() << " nodes\n";
    }
    return 0;
}

int cmd_run(const CommonOpts& o) {
    bench::BenchmarkCase c;
    c.name = o.case_name;
    c.formulation = bench::formulation_from_name(o.formulation);
    c.p = o.p;
    c.max_levels = o.levels;
    c.seed = o.seed;
    c.fixtures = fixtures_or_default(o);

    bench::BenchmarkResult res;
    try {
        res = bench::run_benchmark(c);
    } catch (const std::exception& ex) {
        std::cerr << "solver error: " << ex.what() << "\n";
        return 2;
    }

    fs::create_directories(o.out_dir);
    const std::string tag = run_tag(res);
    for (const std::string& fmt : o.formats) {
        if (fmt == "csv")
            write_atomic(fs::path(o.out_dir) / (tag + ".csv"), result_csv(res));
        else if (fmt == "json")
            write_atomic(fs::path(o.out_dir) / (tag + ".json"), result_json(res).dump(1) + "\n");
        else
            throw CLI::ValidationError("--format", "unknown format " + fmt);
    }
    for (const auto& ch : res.checks)
        std::cout << (ch.pass ? "[pass] " : "[FAIL] ") << ch.name << ": " << ch.value << "\n";
    std::cout << tag << (res.pass ? ": all fixtures pass" : ": FIXTURE FAILURES") << "\n";
    return res.pass ? 0 : 2;
}

int cmd_report(const CommonOpts& o) {
    std::vector<json> runs;
    if (!fs::exists(o.out_dir)) {
        std::cerr << "report error: missing output directory " << o.out_dir << "\n";
        return 3;
    }
    for (const auto& entry : fs::directory_iterator(o.out_dir)) {
        if (entry.path().extension() != ".json") continue;
        if (entry.path().filename() == "report.json") continue;
        std::ifstream f(entry.path());
        json j;
        try {
            f >> j;
        } catch (...) {
            continue;
        }
        if (j.contains("case") && j.contains("levels")) runs.push_back(j);
    }
    if (runs.empty()) {
        std::cerr << "report error: no run outputs in " << o.out_dir << "\n";
        return 3;
    }
    std::sort(runs.begin(), runs.end(), [](const json& a, const json& b) {
        return a.at("case").get<std::string>() + a.at("formulation").get<std::string>() <
               b.at("case").get<std::string>() + b.at("formulation").get<std::string>();
    });

    // Side-by-side error table per case, plus log-log plot data (x = dofs).
    json report;
    report["runs"] = json::array();
    std::ostringstream table;
    for (const auto& run : runs) {
        report["runs"].push_back(run);
        const std::string tag = run.at("case").get<std::string>() + "-" +
                                run.at("formulation").get<std::string>() + "-p" +
                                std::to_string(run.at("p").get<int>());
        table << "# " << tag << "\n";
        table << "level,dofs,l2_rel,h1_rel,K_I,K_II\n";
        std::ostringstream plot;
        for (const auto& lv : run.at("levels")) {
            table << lv.at("level") << ',' << lv.at("dofs") << ','
                  << (lv.contains("l2_rel") ? fmt17(lv.at("l2_rel").get<double>()) : "") << ','
                  << (lv.contains("h1_rel") ? fmt17(lv.at("h1_rel").get<double>()) : "") << ','
                  << (lv.contains("K_I") ? fmt17(lv.at("K_I").get<double>()) : "") << ','
                  << (lv.contains("K_II") ? fmt17(lv.at("K_II").get<double>()) : "") << "\n";
            if (lv.contains("l2_rel"))
                plot << lv.at("dofs") << ' ' << fmt17(lv.at("l2_rel").get<double>()) << "\n";
        }
        const std::string pd = plot.str();
        if (!pd.empty())
            write_atomic(fs::path(o.out_dir) / ("plot-" + tag + ".dat"), pd);
        table << "\n";
    }
    write_atomic(fs::path(o.out_dir) / "report.csv", table.str());
    write_atomic(fs::path(o.out_dir) / "report.json", report.dump(1) + "\n");
    std::cout << table.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polygonal-element elasticity benchmarks"};
    app.require_subcommand(1);
    CommonOpts o;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--case", o.case_name, "benchmark case")
            ->check(CLI::IsMember(bench::known_cases()));
        sub->add_option("--formulation", o.formulation, "polyfem | nsfem | sbfem")
            ->check(CLI::IsMember({"polyfem", "nsfem", "sbfem"}));
        sub->add_option("--p", o.p, "boundary shape order (sbfem)")->check(CLI::Range(1, 3));
        sub->add_option("--levels", o.levels, "limit number of mesh levels (0 = all)");
        sub->add_option("--seed", o.seed, "mesh RNG seed");
        sub->add_option("--out", o.out_dir, "output directory");
        sub->add_option("--fixtures", o.fixtures_path, "fixtures JSON path");
        sub->add_option("--format", o.formats, "output formats (csv, json)");
        sub->set_config("--config");
    };

    CLI::App* mesh = app.add_subcommand("mesh", "generate and write mesh files");
    add_common(mesh);
    CLI::App* run = app.add_subcommand("run", "run a benchmark case against fixtures");
    add_common(run);
    CLI::App* report = app.add_subcommand("report", "aggregate prior run outputs");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    try {
        if (mesh->parsed()) return cmd_mesh(o);
        if (run->parsed()) return cmd_run(o);
        if (report->parsed()) return cmd_report(o);
    } catch (const CLI::ValidationError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << (report->parsed() ? "report error: " : "solver error: ") << ex.what() << "\n";
        return report->parsed() ? 3 : 2;
    }
    return 1;
}
