#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace scrambling::cli {

/// Every experiment parameter. Keys match the long flag names and the
/// key=value config file format.
struct ExperimentConfig {
    std::string command;
    std::string model = "matching";  // matching | sequential | lattice
    std::string graph = "complete";  // complete | line | lattice
    std::string mode = "entangled";  // entangled | pure
    uint32_t n = 0;
    uint64_t t = 0;      // gates; 0 = model default
    uint64_t depth = 0;  // levels or coarse steps; 0 = model default
    uint32_t d = 1;
    double f = 0.1;
    uint32_t m = 1;
    double c = 0;
    uint64_t trials = 1;
    uint64_t seed = 0;
    uint32_t from = 1;
    uint32_t subset = 0;  // subset size; 0 = floor(f n)
    uint32_t samples = 20;
    uint32_t a = 1;
    double p_minus = 0.5;
    double p_plus = 0.5;
    uint32_t threads = 1;
    std::string out;
    std::string format;  // csv | json; empty = infer

    /// Keys in canonical order.
    static const std::vector<std::string>& keys();
    /// Keys that describe the computation (everything except where and how
    /// results are written and how many threads compute them).
    static bool is_data_key(const std::string& key);

    std::string get(const std::string& key) const;
    /// Parses `value` into the field; throws std::invalid_argument naming the key.
    void set(const std::string& key, const std::string& value);

    /// key=value lines in canonical order; read_text(to_text()) reproduces the config.
    std::string to_text() const;
    static ExperimentConfig from_text(const std::string& text);
    void merge_text(const std::string& text);

    /// FNV-1a over the canonical text of the data keys, 16 hex digits.
    std::string hash() const;

    bool operator==(const ExperimentConfig&) const = default;
};

uint64_t fnv1a64(const std::string& bytes);

using Value = std::variant<std::monostate, bool, int64_t, uint64_t, double, std::string>;

struct Record {
    std::vector<std::pair<std::string, Value>> fields;

    Record& add(const std::string& key, Value v) {
        fields.emplace_back(key, std::move(v));
        return *this;
    }
    const Value* find(const std::string& key) const;
};

std::string format_double(double v);
std::string csv_cell(const Value& v);

/// Single owner of the output. Writes `<path>.partial`, flushing after every
/// record, and renames to `<path>` on finish(). abort() appends an
/// "incomplete" marker and leaves the partial file in place.
class RecordWriter {
   public:
    enum class Format { Csv, Json };

    /// Empty path writes to `stream` (stdout).
    RecordWriter(Format format, std::vector<std::string> columns, const std::string& path, std::ostream& stream);
    ~RecordWriter();

    void write(const Record& r);
    void finish();
    void abort(const std::string& reason);
    const std::string& final_path() const { return path_; }

   private:
    std::ostream& out();

    Format format_;
    std::vector<std::string> columns_;
    std::string path_;
    std::string partial_;
    std::unique_ptr<std::ostream> file_;
    std::ostream& stream_;
    bool header_written_ = false;
    bool closed_ = false;
};

/// Output path after applying the default directory from SCRAMBLING_OUTPUT_DIR
/// to relative paths. Empty in, empty out (stdout).
std::string resolve_output_path(const std::string& out);

RecordWriter::Format resolve_format(const ExperimentConfig& config, const std::string& path);

/// Runs `body(k)` for k in [0, trials) on up to `threads` workers and hands
/// the results to `sink` strictly in trial order. At most a bounded window of
/// finished trials is buffered. The first exception is rethrown after all
/// workers stop.
void run_ordered(uint64_t trials, uint32_t threads, const std::function<Record(uint64_t)>& body,
                 const std::function<void(const Record&)>& sink);

std::string code_version();

}  // namespace scrambling::cli
