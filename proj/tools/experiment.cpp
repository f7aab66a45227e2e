#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef SCRAMBLING_VERSION
#define SCRAMBLING_VERSION "dev"
#endif

namespace scrambling::cli {
namespace {

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
        throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Field accessors by key, in canonical order.
struct FieldRef {
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
FieldRef unsigned_field(const std::string& key, T ExperimentConfig::*member) {
    return {[member](const ExperimentConfig& c) { return std::to_string(c.*member); },
            [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_unsigned<T>(key, v); }};
}

FieldRef double_field(const std::string& key, double ExperimentConfig::*member) {
    return {[member](const ExperimentConfig& c) { return format_double(c.*member); },
            [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); }};
}

FieldRef string_field(std::string ExperimentConfig::*member) {
    return {[member](const ExperimentConfig& c) { return c.*member; },
            [member](ExperimentConfig& c, const std::string& v) { c.*member = v; }};
}

const std::vector<std::pair<std::string, FieldRef>>& fields() {
    static const std::vector<std::pair<std::string, FieldRef>> table = {
        {"command", string_field(&ExperimentConfig::command)},
        {"model", string_field(&ExperimentConfig::model)},
        {"graph", string_field(&ExperimentConfig::graph)},
        {"mode", string_field(&ExperimentConfig::mode)},
        {"n", unsigned_field("n", &ExperimentConfig::n)},
        {"t", unsigned_field("t", &ExperimentConfig::t)},
        {"depth", unsigned_field("depth", &ExperimentConfig::depth)},
        {"d", unsigned_field("d", &ExperimentConfig::d)},
        {"f", double_field("f", &ExperimentConfig::f)},
        {"m", unsigned_field("m", &ExperimentConfig::m)},
        {"c", double_field("c", &ExperimentConfig::c)},
        {"trials", unsigned_field("trials", &ExperimentConfig::trials)},
        {"seed", unsigned_field("seed", &ExperimentConfig::seed)},
        {"from", unsigned_field("from", &ExperimentConfig::from)},
        {"subset", unsigned_field("subset", &ExperimentConfig::subset)},
        {"samples", unsigned_field("samples", &ExperimentConfig::samples)},
        {"a", unsigned_field("a", &ExperimentConfig::a)},
        {"p-minus", double_field("p-minus", &ExperimentConfig::p_minus)},
        {"p-plus", double_field("p-plus", &ExperimentConfig::p_plus)},
        {"threads", unsigned_field("threads", &ExperimentConfig::threads)},
        {"out", string_field(&ExperimentConfig::out)},
        {"format", string_field(&ExperimentConfig::format)},
    };
    return table;
}

const FieldRef& field(const std::string& key) {
    for (const auto& [k, ref] : fields()) {
        if (k == key) {
            return ref;
        }
    }
    throw std::invalid_argument("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> out = [] {
        std::vector<std::string> k;
        for (const auto& [key, ref] : fields()) {
            k.push_back(key);
        }
        return k;
    }();
    return out;
}

bool ExperimentConfig::is_data_key(const std::string& key) {
    return key != "out" && key != "format" && key != "threads";
}

std::string ExperimentConfig::get(const std::string& key) const { return field(key).get(*this); }

void ExperimentConfig::set(const std::string& key, const std::string& value) { field(key).set(*this, value); }

std::string ExperimentConfig::to_text() const {
    std::string s;
    for (const auto& key : keys()) {
        s += key + "=" + get(key) + "\n";
    }
    return s;
}

void ExperimentConfig::merge_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        }
        set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
    ExperimentConfig c;
    c.merge_text(text);
    return c;
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::hash() const {
    std::string canonical;
    for (const auto& key : keys()) {
        if (is_data_key(key)) {
            canonical += key + "=" + get(key) + "\n";
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

const Value* Record::find(const std::string& key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Value& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(int64_t x) const { return std::to_string(x); }
        std::string operator()(uint64_t x) const { return std::to_string(x); }
        std::string operator()(double x) const { return format_double(x); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string q = "\"";
            for (char ch : s) {
                q += ch;
                if (ch == '"') {
                    q += '"';
                }
            }
            return q + "\"";
        }
    };
    return std::visit(Visitor{}, v);
}

namespace {

nlohmann::ordered_json to_json(const Record& r) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.fields) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (!std::is_same_v<T, std::monostate>) {
                    j[k] = x;
                }
            },
            v);
    }
    return j;
}

}  // namespace

RecordWriter::RecordWriter(Format format, std::vector<std::string> columns, const std::string& path,
                           std::ostream& stream)
    : format_(format), columns_(std::move(columns)), path_(path), stream_(stream) {
    if (!path_.empty()) {
        const auto parent = std::filesystem::path(path_).parent_path();
        if (!parent.empty()) {
            std::filesystem::create_directories(parent);
        }
        partial_ = path_ + ".partial";
        file_ = std::make_unique<std::ofstream>(partial_, std::ios::trunc);
        if (!*file_) {
            throw std::runtime_error("cannot open output file " + partial_);
        }
    }
}

RecordWriter::~RecordWriter() {
    if (!closed_) {
        abort("writer destroyed before finish");
    }
}

std::ostream& RecordWriter::out() { return file_ ? *file_ : stream_; }

void RecordWriter::write(const Record& r) {
    auto& o = out();
    if (format_ == Format::Csv) {
        if (!header_written_) {
            for (size_t i = 0; i < columns_.size(); ++i) {
                o << (i ? "," : "") << columns_[i];
            }
            o << '\n';
            header_written_ = true;
        }
        for (size_t i = 0; i < columns_.size(); ++i) {
            const Value* v = r.find(columns_[i]);
            o << (i ? "," : "") << (v ? csv_cell(*v) : "");
        }
        o << '\n';
    } else {
        o << to_json(r).dump() << '\n';
    }
    o.flush();
    if (!o) {
        throw std::runtime_error("write failed for " + (path_.empty() ? std::string("stdout") : partial_));
    }
}

void RecordWriter::finish() {
    if (closed_) {
        return;
    }
    closed_ = true;
    if (file_) {
        file_->flush();
        file_.reset();
        std::filesystem::rename(partial_, path_);
    }
}

void RecordWriter::abort(const std::string& reason) {
    if (closed_) {
        return;
    }
    closed_ = true;
    auto& o = out();
    if (format_ == Format::Csv) {
        o << "# INCOMPLETE: " << reason << '\n';
    } else {
        o << nlohmann::json{{"incomplete", true}, {"error", reason}}.dump() << '\n';
    }
    o.flush();
    file_.reset();
}

std::string resolve_output_path(const std::string& out) {
    if (out.empty() || out == "-") {
        return "";
    }
    const std::filesystem::path p(out);
    const char* dir = std::getenv("SCRAMBLING_OUTPUT_DIR");
    if (p.is_relative() && dir && *dir) {
        return (std::filesystem::path(dir) / p).string();
    }
    return out;
}

RecordWriter::Format resolve_format(const ExperimentConfig& config, const std::string& path) {
    if (config.format == "csv") {
        return RecordWriter::Format::Csv;
    }
    if (config.format == "json") {
        return RecordWriter::Format::Json;
    }
    if (!config.format.empty()) {
        throw std::invalid_argument("format: expected csv or json, got '" + config.format + "'");
    }
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        return RecordWriter::Format::Csv;
    }
    return RecordWriter::Format::Json;
}

void run_ordered(uint64_t trials, uint32_t threads, const std::function<Record(uint64_t)>& body,
                 const std::function<void(const Record&)>& sink) {
    if (threads <= 1 || trials <= 1) {
        for (uint64_t k = 0; k < trials; ++k) {
            sink(body(k));
        }
        return;
    }
    const uint64_t window = 4 * uint64_t{threads};
    std::mutex mu;
    std::condition_variable cv;
    std::map<uint64_t, Record> done;
    uint64_t next_claim = 0;
    uint64_t next_emit = 0;
    bool failed = false;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            uint64_t k;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return failed || next_claim >= trials || next_claim < next_emit + window; });
                if (failed || next_claim >= trials) {
                    return;
                }
                k = next_claim++;
            }
            try {
                Record r = body(k);
                std::lock_guard lock(mu);
                done.emplace(k, std::move(r));
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failed) {
                    failed = true;
                    error = std::current_exception();
                }
            }
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (uint32_t i = 0; i < std::min<uint64_t>(threads, trials); ++i) {
        pool.emplace_back(worker);
    }
    try {
        while (next_emit < trials) {
            Record r;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return failed || done.count(next_emit); });
                if (failed) {
                    break;
                }
                r = std::move(done.at(next_emit));
                done.erase(next_emit);
            }
            sink(r);
            {
                std::lock_guard lock(mu);
                ++next_emit;
            }
            cv.notify_all();
        }
    } catch (...) {
        std::lock_guard lock(mu);
        if (!failed) {
            failed = true;
            error = std::current_exception();
        }
    }
    cv.notify_all();
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string code_version() { return SCRAMBLING_VERSION; }

}  // namespace scrambling::cli
