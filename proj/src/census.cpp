#include "dihedral/census.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dihedral/errors.hpp"
#include "dihedral/realquad.hpp"

namespace dihedral {

using json = nlohmann::ordered_json;

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception is rethrown.
// Wraps fn so that progress is reported about every percent.
template <class Fn>
auto with_progress(std::size_t n, const CensusOptions& opt, Fn&& fn)
{
    auto done = std::make_shared<std::atomic<std::size_t>>(0);
    auto lock = std::make_shared<std::mutex>();
    const std::size_t step = std::max<std::size_t>(1, n / 100);
    return [&fn, &opt, done, lock, step, n](std::size_t i) {
        fn(i);
        std::size_t k = ++*done;
        if (opt.progress && (k % step == 0 || k == n)) {
            std::lock_guard guard(*lock);
            opt.progress(k, n);
        }
    };
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

// Smallest index in [0, n) satisfying pred, evaluated in parallel blocks.
template <class Pred>
std::optional<std::size_t> first_index(std::size_t n, unsigned workers, Pred&& pred)
{
    const std::size_t block = workers <= 1 ? 1 : 256 * static_cast<std::size_t>(workers);
    for (std::size_t start = 0; start < n; start += block) {
        std::size_t len = std::min(block, n - start);
        std::vector<char> hit(len, 0);
        parallel_for(len, workers, [&](std::size_t i) { hit[i] = pred(start + i) ? 1 : 0; });
        for (std::size_t i = 0; i < len; ++i)
            if (hit[i]) return start + i;
    }
    return std::nullopt;
}

ClassGroup group_of(const Integer& d, const CensusOptions& opt)
{
    return opt.cache ? opt.cache->class_group(d) : class_group(d);
}

SelmerBasis basis_of(const Integer& d, int p, const CensusOptions& opt)
{
    return opt.cache ? opt.cache->selmer_basis(d, p) : selmer_basis(d, p);
}

void check_p(int p)
{
    if (p < 3 || !is_prime(p)) throw InvalidInput("p must be an odd prime");
}

std::string str(const Integer& n) { return n.get_str(); }

json form_json(const Form& f) { return json::array({str(f.a), str(f.b), str(f.c)}); }
Form form_from(const json& j) { return {Integer(j.at(0).get<std::string>()), Integer(j.at(1).get<std::string>()), Integer(j.at(2).get<std::string>())}; }

std::vector<Integer> negative_fundamentals(const Integer& lo, const Integer& hi)
{
    std::vector<Integer> out;
    for (long d = to_int64(hi); d >= to_int64(lo); --d)
        if (is_fundamental(Integer(d))) out.emplace_back(d);
    return out;
}

// i-th candidate of the scan d = -3, -4, ... (sign < 0) or 5, 6, ... (sign > 0)
Integer scan_point(int sign, std::size_t i)
{
    const long k = static_cast<long>(i);
    return sign < 0 ? Integer(-3 - k) : Integer(5 + k);
}

Integer unramified_multiplicity(int p, int rho) { return (ipow(Integer(p), rho) - 1) / (p - 1); }

std::string param_bound(const Integer& b) { return b.get_str(); }

// Admissible conductors c > 1 over d with c^2 |d| < bound, as (c, tau, irregular).
struct Admissible {
    Integer c;
    int tau = 0;
    bool irregular = false;
};

std::vector<Admissible> admissible_conductors(const Integer& d, int p, const Integer& bound,
                                              const std::vector<std::uint32_t>& primes)
{
    const Integer absd = abs(d);
    Integer cmax = isqrt((bound - 1) / absd);
    std::vector<Admissible> out;
    if (cmax < 2) return out;
    const Integer pp = p;
    std::vector<Integer> qs;
    for (std::uint32_t q : primes) {
        if (q > cmax) break;
        if (static_cast<int>(q) == p) continue;
        int k = kronecker(d, q);
        if (k != 0 && pos_mod(Integer(q) - k, pp) == 0) qs.emplace_back(q);
    }
    const int kp = kronecker(d, pp);
    const bool minus3 = p == 3 && pos_mod(d, 9) == 6;
    std::vector<unsigned> es = {0};
    if (kp != 0) es.push_back(2);
    else {
        es.push_back(1);
        if (minus3) es.push_back(2);
    }
    for (unsigned e : es) {
        Integer base = ipow(pp, e);
        if (base > cmax) continue;
        // depth-first over products of distinct admissible primes
        std::vector<std::pair<std::size_t, Integer>> stack{{0, base}};
        std::vector<int> depth{0};
        while (!stack.empty()) {
            auto [from, c] = stack.back();
            int t = depth.back();
            stack.pop_back();
            depth.pop_back();
            if (c > 1) out.push_back({c, t + (e > 0 ? 1 : 0), minus3 && e == 2});
            for (std::size_t i = from; i < qs.size(); ++i) {
                Integer next = c * qs[i];
                if (next > cmax) break;
                stack.emplace_back(i + 1, next);
                depth.push_back(t + 1);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Admissible& a, const Admissible& b) { return a.c < b.c; });
    return out;
}

} // namespace

// ---------------------------------------------------------------- cache

ClassGroupCache::ClassGroupCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

ClassGroupCache::~ClassGroupCache()
{
    try {
        flush();
    } catch (...) {
    }
}

std::optional<std::filesystem::path> ClassGroupCache::resolve_path(std::optional<std::filesystem::path> given)
{
    if (const char* env = std::getenv("DIHEDRAL_CACHE"); env && *env) return std::filesystem::path(env);
    return given;
}

void ClassGroupCache::load()
{
    if (!path_ || !std::filesystem::exists(*path_)) return;
    std::ifstream in(*path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            Record rec;
            Integer d(j.at("d").get<std::string>());
            rec.group.discriminant = d;
            rec.group.h = std::stoull(j.at("h").get<std::string>());
            for (const auto& x : j.at("divisors")) rec.group.divisors.push_back(std::stoull(x.get<std::string>()));
            for (const auto& f : j.at("generators")) rec.group.generators.push_back(form_from(f));
            if (j.contains("selmer"))
                for (const auto& s : j.at("selmer")) {
                    SelmerRecord sr;
                    sr.p = s.at("p").get<int>();
                    sr.form = form_from(s.at("form"));
                    sr.r = Integer(s.at("r").get<std::string>());
                    sr.alpha = QuadInt{Integer(s.at("x").get<std::string>()), Integer(s.at("y").get<std::string>()), d};
                    rec.selmer.push_back(std::move(sr));
                }
            records_[d] = std::move(rec);
        } catch (const std::exception& e) {
            throw InvalidInput("cache " + path_->string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

ClassGroup ClassGroupCache::class_group(const Integer& d)
{
    {
        std::shared_lock lock(mutex_);
        if (auto it = records_.find(d); it != records_.end()) {
            ++hits_;
            return it->second.group;
        }
    }
    ++misses_;
    ClassGroup g = dihedral::class_group(d);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = records_.try_emplace(d);
    if (inserted) {
        it->second.group = g;
        it->second.dirty = true;
    }
    return it->second.group;
}

SelmerBasis ClassGroupCache::selmer_basis(const Integer& d, int p)
{
    if (d > 0) return dihedral::selmer_basis(d, p);
    ClassGroup g = class_group(d);
    const int rho = g.p_rank(p);
    {
        std::shared_lock lock(mutex_);
        const Record& rec = records_.at(d);
        std::vector<SelmerGenerator> gens;
        for (const SelmerRecord& s : rec.selmer)
            if (s.p == p) gens.push_back({s.alpha, s.form, s.r});
        if (static_cast<int>(gens.size()) == rho) {
            SelmerBasis b;
            b.d = d;
            b.p = p;
            b.class_rank = rho;
            b.generators = std::move(gens);
            if (d == -3 && p == 3) b.generators.push_back({QuadInt{-1, 1, -3}, std::nullopt, 1});
            b.sigma = static_cast<int>(b.generators.size());
            if (b.class_rank == 2 && b.sigma == 2) {
                QuadInt acc = b.generators[0].alpha;
                for (int k = 1; k < p; ++k) {
                    acc = acc * b.generators[1].alpha;
                    b.derived.push_back(acc);
                }
            }
            return b;
        }
    }
    SelmerBasis b = dihedral::selmer_basis(d, p);
    std::unique_lock lock(mutex_);
    Record& rec = records_.at(d);
    std::erase_if(rec.selmer, [&](const SelmerRecord& s) { return s.p == p; });
    for (const SelmerGenerator& gen : b.generators)
        if (gen.form) rec.selmer.push_back({p, *gen.form, gen.r, gen.alpha});
    rec.dirty = true;
    return b;
}

void ClassGroupCache::flush()
{
    std::unique_lock lock(mutex_);
    if (!path_) return;
    std::ofstream out;
    for (auto& [d, rec] : records_) {
        if (!rec.dirty) continue;
        if (!out.is_open()) {
            if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
            out.open(*path_, std::ios::app);
            if (!out) throw InvalidInput("cannot write cache " + path_->string());
        }
        json j;
        j["d"] = str(d);
        j["h"] = std::to_string(rec.group.h);
        j["divisors"] = json::array();
        for (auto x : rec.group.divisors) j["divisors"].push_back(std::to_string(x));
        j["generators"] = json::array();
        for (const Form& f : rec.group.generators) j["generators"].push_back(form_json(f));
        j["selmer"] = json::array();
        for (const SelmerRecord& s : rec.selmer)
            j["selmer"].push_back({{"p", s.p}, {"form", form_json(s.form)}, {"r", str(s.r)}, {"x", str(s.alpha.x)}, {"y", str(s.alpha.y)}});
        out << j.dump() << '\n';
        rec.dirty = false;
    }
}

std::uint64_t ClassGroupCache::hits() const { return hits_; }
std::uint64_t ClassGroupCache::misses() const { return misses_; }
std::size_t ClassGroupCache::size() const
{
    std::shared_lock lock(mutex_);
    return records_.size();
}

// ---------------------------------------------------------------- report formats

std::string to_csv(const CensusReport& r)
{
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    std::ostringstream out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << field(r.columns[i]);
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << field(row[i]);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const CensusReport& r)
{
    json j;
    j["report"] = r.name;
    j["parameters"] = json::object();
    for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    return j.dump(2) + "\n";
}

CensusReport report_from_json(const std::string& text)
{
    json j = json::parse(text);
    CensusReport r;
    r.name = j.at("report").get<std::string>();
    for (const auto& [k, v] : j.at("parameters").items()) r.parameters.emplace_back(k, v.get<std::string>());
    r.columns = j.at("columns").get<std::vector<std::string>>();
    r.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    return r;
}

std::string to_text(const CensusReport& r)
{
    std::ostringstream out;
    out << r.name;
    for (const auto& [k, v] : r.parameters) out << "  " << k << "=" << v;
    out << '\n';
    std::vector<std::size_t> width(r.columns.size());
    for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = r.columns[i].size();
    for (const auto& row : r.rows)
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << cells[i];
        out << '\n';
    };
    line(r.columns);
    for (const auto& row : r.rows) line(row);
    return out.str();
}

// ---------------------------------------------------------------- scans

CensusReport rank_frequencies(int p, const Integer& d_min, const Integer& d_max, const CensusOptions& opt)
{
    check_p(p);
    if (!(d_min < d_max && d_max < 0)) throw InvalidInput("rank_frequencies needs d_min < d_max < 0");
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Integer> ds = negative_fundamentals(d_min, d_max);
    std::vector<int> ranks(ds.size());
    parallel_for(ds.size(), opt.workers,
                 with_progress(ds.size(), opt, [&](std::size_t i) { ranks[i] = group_of(ds[i], opt).p_rank(p); }));
    std::map<int, std::uint64_t> count;
    for (int r : ranks) ++count[r];
    const std::string ps = std::to_string(p);
    CensusReport rep;
    rep.name = "rank-frequencies";
    rep.parameters = {{"p", ps}, {"d_min", str(d_min)}, {"d_max", str(d_max)}};
    rep.columns = {"rho_" + ps, "m_" + ps + "(d,1)", "count"};
    for (const auto& [rho, n] : count) rep.rows.push_back({std::to_string(rho), str(unramified_multiplicity(p, rho)), std::to_string(n)});
    rep.runtime.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.runtime.workers = opt.workers;
    if (opt.cache) {
        rep.runtime.cache_hits = opt.cache->hits();
        rep.runtime.cache_misses = opt.cache->misses();
    }
    return rep;
}

MinimalDiscriminant minimal_discriminant(int p, int rho, int sign, const Integer& bound, const CensusOptions& opt)
{
    check_p(p);
    if (rho < 0 || (sign != 1 && sign != -1)) throw InvalidInput("minimal_discriminant: bad rank or sign");
    if (sign > 0 && rho >= 2) throw Unsupported("real p-class ranks above 1 are not decided");
    const long long n = to_int64(bound) - (sign < 0 ? 2 : 4);
    auto hit = first_index(static_cast<std::size_t>(std::max(0LL, n)), opt.workers, [&](std::size_t i) {
        Integer d = scan_point(sign, i);
        if (!is_fundamental(d)) return false;
        return (sign < 0 ? group_of(d, opt).p_rank(p) : real_p_rank(d, p)) == rho;
    });
    if (!hit) throw SearchExhausted("no discriminant with the requested rank up to " + bound.get_str());
    Integer d = scan_point(sign, *hit);
    return {d, unramified_multiplicity(p, rho)};
}

CensusReport multiplet_census(int p, const Integer& bound, const CensusOptions& opt)
{
    check_p(p);
    if (bound <= 3) throw InvalidInput("multiplet_census needs a bound above 3");
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::uint32_t> primes = primes_up_to(static_cast<std::uint32_t>(to_int64(isqrt(bound)) + 1));
    std::vector<Integer> ds = negative_fundamentals(-(bound - 1), Integer(-3));

    struct Tally {
        std::map<Integer, std::uint64_t> unramified, ramified;
        std::uint64_t verified = 0;
    };
    std::vector<Tally> per_d(ds.size());
    const bool skip_eisenstein = p == 3;
    auto scan = [&](std::size_t i) {
        const Integer& d = ds[i];
        Tally& t = per_d[i];
        const int rho = group_of(d, opt).p_rank(p);
        if (rho >= 1) ++t.unramified[unramified_multiplicity(p, rho)];
        if (rho != 0 || (skip_eisenstein && d == -3)) return;
        for (const Admissible& a : admissible_conductors(d, p, bound, primes)) {
            // sigma = 0, so every admissible conductor is free
            Integer m = ipow(Integer(p), a.irregular ? 1 : 0) * ipow(Integer(p - 1), a.tau - 1);
            ++t.ramified[m];
            if (opt.verify_every && mpz_fdiv_ui(Integer(abs(d) + a.c).get_mpz_t(), opt.verify_every) == 0) {
                require(general_multiplicity(d, p, a.c) == m, "divisor sum disagrees with the free formula");
                ++t.verified;
            }
        }
    };
    parallel_for(ds.size(), opt.workers, with_progress(ds.size(), opt, scan));

    std::map<Integer, std::uint64_t> unram, ram, eis;
    std::uint64_t verified = 0;
    for (const Tally& t : per_d) {
        for (const auto& [m, n] : t.unramified) unram[m] += n;
        for (const auto& [m, n] : t.ramified) ram[m] += n;
        verified += t.verified;
    }
    if (skip_eisenstein) {
        SelmerBasis b = basis_of(-3, 3, opt);
        for (const Admissible& a : admissible_conductors(-3, 3, bound, primes)) {
            Configuration cfg = configuration(b, a.c);
            Integer m = multiplicity(cfg).m;
            require(general_multiplicity(cfg) == m, "divisor sum disagrees over Q(sqrt -3)");
            ++verified;
            if (m > 0) ++eis[m];
        }
    }

    std::set<Integer> ms;
    for (const auto* tab : {&unram, &ram, &eis})
        for (const auto& [m, n] : *tab) ms.insert(m);
    const std::string ps = std::to_string(p);
    CensusReport rep;
    rep.name = "multiplets";
    rep.parameters = {{"p", ps}, {"bound", param_bound(bound)}};
    rep.columns = {"m_" + ps + "(d,c)", "c=1", "c>1"};
    if (skip_eisenstein) rep.columns.push_back("d=-3");
    rep.columns.push_back("fields");
    auto get = [](const std::map<Integer, std::uint64_t>& t, const Integer& m) {
        auto it = t.find(m);
        return it == t.end() ? std::uint64_t{0} : it->second;
    };
    Integer total_fields = 0;
    std::uint64_t tot1 = 0, tot2 = 0, tot3 = 0;
    for (const Integer& m : ms) {
        std::uint64_t a = get(unram, m), b = get(ram, m), c = get(eis, m);
        Integer fields = m * Integer(static_cast<unsigned long>(a + b + c));
        total_fields += fields;
        tot1 += a;
        tot2 += b;
        tot3 += c;
        std::vector<std::string> row = {str(m), std::to_string(a), std::to_string(b)};
        if (skip_eisenstein) row.push_back(std::to_string(c));
        row.push_back(str(fields));
        rep.rows.push_back(std::move(row));
    }
    std::vector<std::string> total = {"total", std::to_string(tot1), std::to_string(tot2)};
    if (skip_eisenstein) total.push_back(std::to_string(tot3));
    total.push_back(str(total_fields));
    rep.rows.push_back(std::move(total));
    rep.runtime.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.runtime.workers = opt.workers;
    rep.runtime.verified = verified;
    if (opt.cache) {
        rep.runtime.cache_hits = opt.cache->hits();
        rep.runtime.cache_misses = opt.cache->misses();
    }
    return rep;
}

// ---------------------------------------------------------------- first occurrences

Constraint Constraint::parse(const std::string& text)
{
    static const std::regex congruence(R"(^\s*(?:d\s*(?:=|==|≡)\s*)?([+-]?\d+)\s*mod\s*(\d+)\s*$)");
    static const std::regex kron(R"(^\s*\(\s*d\s*/\s*(\d+)\s*\)\s*=\s*([+-]?1)\s*$)");
    std::smatch m;
    Constraint c;
    if (text.empty() || text == "none") return c;
    if (std::regex_match(text, m, congruence)) {
        c.kind = Kind::Congruence;
        c.residue = Integer(m[1].str());
        c.modulus = Integer(m[2].str());
        if (c.modulus < 1) throw InvalidInput("constraint modulus must be positive");
        return c;
    }
    if (std::regex_match(text, m, kron)) {
        c.kind = Kind::Kronecker;
        c.q = Integer(m[1].str());
        c.value = std::stoi(m[2].str());
        return c;
    }
    throw InvalidInput("cannot parse constraint '" + text + "' (use 'a mod n' or '(d/q)=e')");
}

bool Constraint::holds(const Integer& d) const
{
    switch (kind) {
    case Kind::None: return true;
    case Kind::Congruence: return pos_mod(d - residue, modulus) == 0;
    case Kind::Kronecker: return kronecker(d, q) == value;
    }
    return false;
}

std::string Constraint::to_string() const
{
    switch (kind) {
    case Kind::None: return "none";
    case Kind::Congruence: return residue.get_str() + " mod " + modulus.get_str();
    case Kind::Kronecker: return "(d/" + q.get_str() + ")=" + (value > 0 ? "+1" : "-1");
    }
    return "";
}

FreeConductorRow first_free_conductor(int p, const Integer& c, const Constraint& constraint, int rho,
                                      const Integer& bound, const CensusOptions& opt)
{
    check_p(p);
    if (c < 2) throw InvalidInput("first_free_conductor needs c > 1");
    if (rho < 1) throw InvalidInput("witnesses need p-class rank at least 1");
    const long long n = to_int64(bound);
    auto candidate = [&](const Integer& d) {
        return is_fundamental(d) && constraint.holds(d) && admissibility(d, p, c).admissible &&
               group_of(d, opt).p_rank(p) == rho;
    };
    auto hit = first_index(static_cast<std::size_t>(std::max(0LL, n - 3)), opt.workers, [&](std::size_t i) {
        Integer d = scan_point(-1, i + 1);
        if (!candidate(d)) return false;
        return defect(basis_of(d, p, opt), c) == 0;
    });
    if (!hit) throw SearchExhausted("no free discriminant for c = " + c.get_str() + " down to -" + bound.get_str());
    FreeConductorRow row;
    row.d = scan_point(-1, *hit + 1);
    row.constraint = constraint;
    row.c = c;
    SelmerBasis b = basis_of(row.d, p, opt);
    row.form = *b.generators.front().form;
    std::vector<Integer> exclude;
    for (const PrimePower& pe : factorize(c)) exclude.push_back(pe.prime);
    // Prefer a witness that lies in the suborder itself (c | y) or squares into it (c | x).
    std::vector<Representation> reps = represented_primes(row.form, p, exclude, kDefaultRepresentBound, 64);
    if (reps.empty()) throw SearchExhausted("no represented prime for " + row.form.to_string());
    row.r = reps.front().r;
    row.alpha = selmer_generator(row.d, p, row.form, row.r);
    for (const Representation& rep : reps) {
        QuadInt a = selmer_generator(row.d, p, row.form, rep.r);
        if (mpz_divisible_p(a.y.get_mpz_t(), c.get_mpz_t()) || mpz_divisible_p(a.x.get_mpz_t(), c.get_mpz_t())) {
            row.r = rep.r;
            row.alpha = a;
            break;
        }
    }
    row.d_L = c * c * row.d;
    row.m = multiplicity(configuration(b, c)).m;
    return row;
}

CensusReport first_free_report(const std::vector<FreeConductorRow>& rows)
{
    CensusReport rep;
    rep.name = "first-free";
    rep.columns = {"d", "condition", "F=(A,B,C)", "r", "(x,y)", "c", "d_L", "m"};
    for (const auto& r : rows)
        rep.rows.push_back({str(r.d), r.constraint.to_string(), r.form.to_string(), str(r.r), r.alpha.to_string(), str(r.c),
                            str(r.d_L), str(r.m)});
    return rep;
}

// ---------------------------------------------------------------- irregular survey

std::vector<IrregularRow> irregular_survey(const std::vector<Integer>& ds, const CensusOptions& opt)
{
    for (const Integer& d : ds) {
        if (!is_fundamental(d)) throw InvalidInput(d.get_str() + " is not a fundamental discriminant");
        if (pos_mod(d, 9) != 6) throw InvalidInput(d.get_str() + " is not -3 mod 9");
    }
    std::vector<IrregularRow> rows(ds.size());
    parallel_for(ds.size(), opt.workers, [&](std::size_t i) {
        IrregularRow& row = rows[i];
        row.d = ds[i];
        SelmerBasis b;
        try {
            b = basis_of(row.d, 3, opt);
        } catch (const Unsupported& e) {
            row.note = "unsupported";
            return;
        }
        row.rho = b.class_rank;
        row.sigma = b.sigma;
        row.delta3_3 = defect(b, 3);
        row.delta3_9 = defect(b, 9);
        Configuration cfg = configuration(b, 9);
        Integer m = multiplicity(cfg).m;
        require(general_multiplicity(cfg) == m, "divisor sum disagrees on an irregular conductor");
        row.m = m;
        if (m > 0) row.d_L = 81 * row.d;
    });
    return rows;
}

CensusReport irregular_report(const std::vector<IrregularRow>& rows)
{
    CensusReport rep;
    rep.name = "irregular";
    rep.columns = {"d", "rho_3", "sigma_3", "delta_3(3)", "delta_3(9)", "c", "d_L", "m_3(d,c)"};
    auto opt_str = [](const std::optional<int>& x) { return x ? std::to_string(*x) : std::string("unsupported"); };
    for (const auto& r : rows)
        rep.rows.push_back({str(r.d), opt_str(r.rho), opt_str(r.sigma), opt_str(r.delta3_3), opt_str(r.delta3_9), str(r.c),
                            r.d_L ? str(*r.d_L) : std::string("---"), r.m ? str(*r.m) : std::string("unsupported")});
    return rep;
}

} // namespace dihedral
