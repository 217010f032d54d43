#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dihedral/census.hpp"
#include "dihedral/errors.hpp"
#include "dihedral/multiplicity.hpp"
#include "dihedral/residues.hpp"

using namespace dihedral;

namespace {

constexpr long kScaledDiscriminant = 100000;
constexpr long kScaledBound = 100000;

struct Config {
    std::string d, c = "1", min = "-100000", max = "-1", bound, sign = "-";
    std::vector<std::string> conductors, constraints;
    std::string input, output, format = "text", cache;
    int p = 3, rho = 1;
    unsigned workers = 1, verify_every = 100;
    bool full = false, verify = false, progress = false;
};

Integer parse_integer(const std::string& text, const char* flag)
{
    Integer n;
    if (text.empty() || n.set_str(text, 10) != 0) throw InvalidInput(std::string("--") + flag + ": not an integer: '" + text + "'");
    return n;
}

std::string render(const CensusReport& r, const std::string& format)
{
    if (format == "json") return to_json(r);
    if (format == "csv") return to_csv(r);
    return to_text(r);
}

void emit(const CensusReport& r, const Config& cfg, bool metadata = true)
{
    std::string body = render(r, cfg.format);
    if (cfg.output.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(cfg.output);
        if (!out) throw InvalidInput("cannot write " + cfg.output);
        out << body;
    }
    if (!metadata) return;
    const auto& rt = r.runtime;
    std::cerr << "# " << r.name << ": seconds=" << rt.seconds << " workers=" << rt.workers << " cache_hits=" << rt.cache_hits
              << " cache_misses=" << rt.cache_misses << " verified=" << rt.verified << '\n';
}

std::string occupation_string(const std::vector<int>& n)
{
    std::string s = "(";
    for (std::size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + std::to_string(n[i]);
    return s + ")";
}

CensusReport defect_report(const Config& cfg)
{
    const Integer d = parse_integer(cfg.d, "d"), c = parse_integer(cfg.c, "c");
    if (c < 1) throw InvalidInput("--c must be positive");
    SelmerBasis b = selmer_basis(d, cfg.p);
    RankCounters rc = rank_counters(d, c, cfg.p);
    CensusReport r;
    r.name = "defect";
    r.parameters = {{"d", d.get_str()},
                    {"p", std::to_string(cfg.p)},
                    {"c", c.get_str()},
                    {"rho_" + std::to_string(cfg.p), std::to_string(b.class_rank)},
                    {"sigma_" + std::to_string(cfg.p), std::to_string(b.sigma)},
                    {"t", std::to_string(rc.t)},
                    {"w", std::to_string(rc.w)}};
    const std::string ps = std::to_string(cfg.p);
    r.columns = {"conductor", "delta_" + ps, "dim V_" + ps + "(conductor)"};
    auto row = [&](const Integer& q) {
        RingSpace v = ring_space(b, q);
        r.rows.push_back({q.get_str(), std::to_string(v.codimension()), std::to_string(v.dimension())});
    };
    for (const Integer& q : conductor_parts(c)) row(q);
    if (c == 1 || conductor_parts(c).size() > 1) row(c);
    return r;
}

CensusReport multiplicity_report(const Config& cfg)
{
    const Integer d = parse_integer(cfg.d, "d"), c = parse_integer(cfg.c, "c");
    MultiplicityBreakdown m = multiplicity(d, cfg.p, c);
    CensusReport r;
    r.name = "multiplicity";
    r.parameters = {{"d", d.get_str()}, {"p", std::to_string(cfg.p)}, {"c", c.get_str()}};
    r.columns = {"quantity", "value"};
    const std::string ps = std::to_string(cfg.p);
    r.rows.push_back({"m_" + ps + "(d,c)", m.m.get_str()});
    r.rows.push_back({"formula", m.formula});
    if (m.admissible) {
        r.rows.push_back({"U", m.U.get_str()});
        r.rows.push_back({"F", m.F.get_str()});
        r.rows.push_back({"R", to_string(m.R)});
        r.rows.push_back({"rho", std::to_string(m.rho)});
        r.rows.push_back({"omega", std::to_string(m.omega)});
        r.rows.push_back({"tau", std::to_string(m.tau)});
        r.rows.push_back({"u", std::to_string(m.u)});
        r.rows.push_back({"v", std::to_string(m.v)});
        r.rows.push_back({"delta", std::to_string(m.delta)});
        if (!m.occupations.empty()) r.rows.push_back({"(n_i)", occupation_string(m.occupations)});
        if (m.n) r.rows.push_back({"n", std::to_string(*m.n)});
        if (m.delta3_3) r.rows.push_back({"delta_3(3)", std::to_string(*m.delta3_3)});
        if (m.delta3_9) r.rows.push_back({"delta_3(9)", std::to_string(*m.delta3_9)});
        DihedralDiscriminant disc = dihedral_discriminant(d, cfg.p, c);
        r.rows.push_back({"d_N", disc.d_N.get_str()});
        r.rows.push_back({"d_L", disc.d_L.get_str()});
    }
    if (cfg.verify) {
        Integer g = general_multiplicity(d, cfg.p, c);
        require(g == m.m, "divisor sum " + g.get_str() + " disagrees with closed form " + m.m.get_str());
        r.rows.push_back({"divisor sum", g.get_str()});
    }
    return r;
}

CensusOptions census_options(const Config& cfg)
{
    CensusOptions opt;
    opt.workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.workers;
    opt.verify_every = cfg.verify_every;
    if (auto path = ClassGroupCache::resolve_path(cfg.cache.empty() ? std::nullopt : std::optional<std::filesystem::path>(cfg.cache)))
        opt.cache = std::make_shared<ClassGroupCache>(*path);
    if (cfg.progress)
        opt.progress = [](std::size_t done, std::size_t total) {
            std::cerr << "\r# progress " << done << "/" << total << (done == total ? "\n" : "") << std::flush;
        };
    return opt;
}

void require_full(const Config& cfg, const Integer& size, long scaled, const char* what)
{
    if (!cfg.full && size > scaled)
        throw InvalidInput(std::string(what) + " above " + std::to_string(scaled) + " needs --full");
}

int run(int argc, char** argv)
{
    Config cfg;
    CLI::App app{"Dihedral field multiplicities over quadratic fields"};
    app.require_subcommand(1);
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
        sub->add_option("-o,--output", cfg.output, "write the report to a file");
    };
    auto add_scan = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "worker threads, 0 = all cores");
        sub->add_option("--cache", cfg.cache, "class group cache file (DIHEDRAL_CACHE overrides)");
        sub->add_option("--verify-every", cfg.verify_every, "re-check every n-th (d, c) against the divisor sum");
        sub->add_flag("--full", cfg.full, "allow full-size scans");
        sub->add_flag("--progress", cfg.progress, "report progress on stderr");
    };

    auto* defect_cmd = app.add_subcommand("defect", "p-defect and ring space dimensions of a conductor");
    defect_cmd->add_option("--d", cfg.d, "fundamental discriminant")->required();
    defect_cmd->add_option("--p", cfg.p, "odd prime");
    defect_cmd->add_option("--c", cfg.c, "conductor");
    add_format(defect_cmd);

    auto* mult_cmd = app.add_subcommand("multiplicity", "multiplicity of dihedral fields with given d and c");
    mult_cmd->add_option("--d", cfg.d, "fundamental discriminant")->required();
    mult_cmd->add_option("--p", cfg.p, "odd prime");
    mult_cmd->add_option("--c", cfg.c, "conductor");
    mult_cmd->add_flag("--verify", cfg.verify, "also evaluate the divisor sum and compare");
    add_format(mult_cmd);

    auto* census = app.add_subcommand("census", "table scans");
    census->require_subcommand(1);
    auto* rank_cmd = census->add_subcommand("rank-frequencies", "p-class rank counts over a range of d < 0");
    rank_cmd->add_option("--p", cfg.p, "odd prime");
    rank_cmd->add_option("--min", cfg.min, "smallest discriminant");
    rank_cmd->add_option("--max", cfg.max, "largest discriminant");
    auto* min_cmd = census->add_subcommand("minimal", "discriminant of least |d| with given p-class rank");
    min_cmd->add_option("--p", cfg.p, "odd prime");
    min_cmd->add_option("--rho", cfg.rho, "p-class rank");
    min_cmd->add_option("--sign", cfg.sign, "+ or -")->check(CLI::IsMember({"+", "-"}));
    min_cmd->add_option("--bound", cfg.bound, "largest |d| searched");
    auto* mult_census = census->add_subcommand("multiplets", "multiplet counts with c^2 |d| below a bound");
    mult_census->add_option("--p", cfg.p, "odd prime");
    mult_census->add_option("--bound", cfg.bound, "root discriminant bound B");
    auto* free_cmd = census->add_subcommand("first-free", "first d with a free conductor");
    free_cmd->add_option("--p", cfg.p, "odd prime");
    free_cmd->add_option("--c", cfg.conductors, "conductor, repeatable")->required();
    free_cmd->add_option("--constraint", cfg.constraints, "'a mod n' or '(d/q)=e', one per --c");
    free_cmd->add_option("--rho", cfg.rho, "p-class rank");
    free_cmd->add_option("--bound", cfg.bound, "largest |d| searched");
    auto* irr_cmd = census->add_subcommand("irregular", "survey of the irregular conductor 9");
    irr_cmd->add_option("--input", cfg.input, "file with one discriminant per line")->required();
    for (auto* sub : {rank_cmd, min_cmd, mult_census, free_cmd, irr_cmd}) {
        add_format(sub);
        add_scan(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (*defect_cmd) emit(defect_report(cfg), cfg, false);
    if (*mult_cmd) emit(multiplicity_report(cfg), cfg, false);
    if (*rank_cmd) {
        Integer lo = parse_integer(cfg.min, "min"), hi = parse_integer(cfg.max, "max");
        require_full(cfg, abs(lo), kScaledDiscriminant, "|min|");
        CensusOptions opt = census_options(cfg);
        emit(rank_frequencies(cfg.p, lo, hi, opt), cfg);
    }
    if (*min_cmd) {
        Integer bound = cfg.bound.empty() ? Integer(10000000) : parse_integer(cfg.bound, "bound");
        CensusOptions opt = census_options(cfg);
        auto t0 = std::chrono::steady_clock::now();
        MinimalDiscriminant md = minimal_discriminant(cfg.p, cfg.rho, cfg.sign == "+" ? 1 : -1, bound, opt);
        CensusReport r;
        r.name = "minimal";
        const std::string ps = std::to_string(cfg.p);
        r.parameters = {{"p", ps}, {"sign", cfg.sign}, {"bound", bound.get_str()}};
        r.columns = {"rho_" + ps, "d", "m_" + ps + "(d,1)"};
        r.rows.push_back({std::to_string(cfg.rho), md.d.get_str(), md.m.get_str()});
        r.runtime.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.runtime.workers = opt.workers;
        emit(r, cfg);
    }
    if (*mult_census) {
        Integer bound = cfg.bound.empty() ? Integer(10000) : parse_integer(cfg.bound, "bound");
        require_full(cfg, bound, kScaledBound, "--bound");
        emit(multiplet_census(cfg.p, bound, census_options(cfg)), cfg);
    }
    if (*free_cmd) {
        if (!cfg.constraints.empty() && cfg.constraints.size() != cfg.conductors.size())
            throw InvalidInput("give one --constraint per --c");
        Integer bound = cfg.bound.empty() ? Integer(1000000) : parse_integer(cfg.bound, "bound");
        CensusOptions opt = census_options(cfg);
        auto t0 = std::chrono::steady_clock::now();
        std::vector<FreeConductorRow> rows;
        for (std::size_t i = 0; i < cfg.conductors.size(); ++i) {
            Constraint k = cfg.constraints.empty() ? Constraint{} : Constraint::parse(cfg.constraints[i]);
            rows.push_back(first_free_conductor(cfg.p, parse_integer(cfg.conductors[i], "c"), k, cfg.rho, bound, opt));
        }
        CensusReport r = first_free_report(rows);
        r.parameters = {{"p", std::to_string(cfg.p)}, {"rho", std::to_string(cfg.rho)}, {"bound", bound.get_str()}};
        r.runtime.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.runtime.workers = opt.workers;
        r.runtime.verified = rows.size();
        emit(r, cfg);
    }
    if (*irr_cmd) {
        std::ifstream in(cfg.input);
        if (!in) throw InvalidInput("cannot read " + cfg.input);
        std::vector<Integer> ds;
        for (std::string line; std::getline(in, line);) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream words(line);
            for (std::string w; words >> w;) ds.push_back(parse_integer(w, "input"));
        }
        CensusOptions opt = census_options(cfg);
        auto t0 = std::chrono::steady_clock::now();
        CensusReport r = irregular_report(irregular_survey(ds, opt));
        r.runtime.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.runtime.workers = opt.workers;
        r.runtime.verified = ds.size();
        emit(r, cfg);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Unsupported& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
