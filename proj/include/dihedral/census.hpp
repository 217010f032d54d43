#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "dihedral/multiplicity.hpp"
#include "dihedral/quadforms.hpp"
#include "dihedral/ringspace.hpp"

namespace dihedral {

// Line-delimited JSON cache of class groups and Selmer generators, keyed by d.
// Concurrent readers, serialized writers; new records are appended on flush().
class ClassGroupCache {
public:
    ClassGroupCache() = default;
    explicit ClassGroupCache(std::filesystem::path path);
    ~ClassGroupCache();
    ClassGroupCache(const ClassGroupCache&) = delete;
    ClassGroupCache& operator=(const ClassGroupCache&) = delete;

    // DIHEDRAL_CACHE wins over the given path.
    static std::optional<std::filesystem::path> resolve_path(std::optional<std::filesystem::path> given);

    ClassGroup class_group(const Integer& d);
    SelmerBasis selmer_basis(const Integer& d, int p);
    void flush();

    std::uint64_t hits() const;
    std::uint64_t misses() const;
    std::size_t size() const;

private:
    struct SelmerRecord {
        int p = 0;
        Form form;
        Integer r;
        QuadInt alpha;
    };
    struct Record {
        ClassGroup group;
        std::vector<SelmerRecord> selmer;
        bool dirty = false;
    };
    void load();

    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::map<Integer, Record> records_;
    std::atomic<std::uint64_t> hits_{0}, misses_{0};
};

struct CensusOptions {
    unsigned workers = 1;
    std::shared_ptr<ClassGroupCache> cache;   // optional
    unsigned verify_every = 100;              // re-check every n-th row against the divisor sum; 1 = all
    std::function<void(std::size_t done, std::size_t total)> progress;   // called from workers, serialized
};

struct CensusReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    struct Runtime {
        double seconds = 0;
        unsigned workers = 1;
        std::uint64_t cache_hits = 0, cache_misses = 0;
        std::uint64_t verified = 0;
    } runtime;   // not part of the serialized report
};

std::string to_csv(const CensusReport& r);
std::string to_json(const CensusReport& r);
std::string to_text(const CensusReport& r);
CensusReport report_from_json(const std::string& text);

CensusReport rank_frequencies(int p, const Integer& d_min, const Integer& d_max, const CensusOptions& opt = {});

struct MinimalDiscriminant {
    Integer d;
    Integer m;   // m_p(d, 1)
};
// sign = -1 scans d = -3, -4, ...; sign = +1 scans 5, 8, ...
MinimalDiscriminant minimal_discriminant(int p, int rho, int sign, const Integer& bound = 10000000,
                                         const CensusOptions& opt = {});

CensusReport multiplet_census(int p, const Integer& bound, const CensusOptions& opt = {});

// "a mod n" or "(d/q)=e"
struct Constraint {
    enum class Kind { None, Congruence, Kronecker } kind = Kind::None;
    Integer modulus, residue;   // congruence
    Integer q;                  // Kronecker
    int value = 0;

    static Constraint parse(const std::string& text);
    bool holds(const Integer& d) const;
    std::string to_string() const;
};

struct FreeConductorRow {
    Integer d;
    Constraint constraint;
    Form form;
    Integer r;
    QuadInt alpha;
    Integer c;
    Integer d_L;
    Integer m;
};
// First d < -3 (descending) with the constraint, p-class rank rho, c admissible and delta_p(c) = 0.
FreeConductorRow first_free_conductor(int p, const Integer& c, const Constraint& constraint, int rho = 1,
                                      const Integer& bound = 1000000, const CensusOptions& opt = {});
CensusReport first_free_report(const std::vector<FreeConductorRow>& rows);

struct IrregularRow {
    Integer d;
    std::optional<int> rho, sigma, delta3_3, delta3_9;
    Integer c = 9;
    std::optional<Integer> d_L;   // empty when m = 0
    std::optional<Integer> m;
    std::string note;             // set when the field is not supported
};
std::vector<IrregularRow> irregular_survey(const std::vector<Integer>& ds, const CensusOptions& opt = {});
CensusReport irregular_report(const std::vector<IrregularRow>& rows);

} // namespace dihedral
