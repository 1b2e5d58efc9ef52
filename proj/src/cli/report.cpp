#include <algorithm>
#include <ostream>

#include "common.hpp"

namespace zipfirm::cli {
namespace {

struct Entry {
    std::string timestamp;
    std::string path;
    Json body;
};

std::string rel_path(const fs::path& p, const fs::path& base) { return p.lexically_relative(base).generic_string(); }

class Report final : public Command {
public:
    void setup(CLI::App& sub) override {
        sub.add_option("--dir", dir_, "Directory scanned recursively for *.manifest.json (default .)");
        sub.add_option("--out", out_file_, "Write the report here instead of standard output");
    }

    void execute(std::ostream& out, std::ostream&) override {
        std::error_code ec;
        if (!fs::is_directory(dir_, ec)) throw Error(ErrorKind::io, "report: not a directory: " + dir_.string());

        std::vector<fs::path> manifests;
        for (auto it = fs::recursive_directory_iterator(dir_, ec); !ec && it != fs::recursive_directory_iterator();
             it.increment(ec)) {
            const auto name = it->path().filename().string();
            if (it->is_regular_file() && name.ends_with(".manifest.json")) manifests.push_back(it->path());
        }
        if (ec) throw Error(ErrorKind::io, "report: cannot scan " + dir_.string() + ": " + ec.message());
        std::sort(manifests.begin(), manifests.end());

        std::vector<Entry> entries;
        Json errors = Json::array();
        for (const auto& path : manifests) {
            const auto rel = rel_path(path, dir_);
            try {
                entries.push_back(load_entry(path, rel));
            } catch (const EntryError& e) {
                errors.push_back(Json{{"path", e.path}, {"manifest", rel}, {"error", e.what()}});
            } catch (const std::exception& e) {
                errors.push_back(Json{{"path", rel}, {"manifest", rel}, {"error", e.what()}});
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.timestamp, a.path) < std::tie(b.timestamp, b.path);
        });

        Json report;
        report["schema"] = json_io::kSchema;
        report["kind"] = "report";
        report["directory"] = dir_.generic_string();
        report["entries"] = Json::array();
        for (auto& e : entries) report["entries"].push_back(std::move(e.body));
        report["errors"] = std::move(errors);
        const auto text = report.dump(2) + "\n";
        if (out_file_) {
            write_text(*out_file_, text);
        } else {
            out << text;
        }
    }

private:
    struct EntryError : std::runtime_error {
        EntryError(std::string p, const std::string& what) : std::runtime_error(what), path(std::move(p)) {}
        std::string path;
    };

    Entry load_entry(const fs::path& path, const std::string& rel) const {
        const auto m = read_json(path);
        if (!m.is_object() || m.value("kind", "") != "run_manifest" || !m.contains("timestamp") ||
            !m["timestamp"].is_string() || !m.contains("output_paths") || !m["output_paths"].is_array()) {
            throw EntryError(rel, "not a run manifest");
        }
        const auto base = path.parent_path();
        Json results = Json::object();
        bool verified = true;
        for (const auto& out : m["output_paths"]) {
            if (!out.is_string()) throw EntryError(rel, "output_paths holds a non-string");
            const auto name = out.get<std::string>();
            const auto file = base / name;
            const auto out_rel = rel_path(file, dir_);
            std::string text;
            try {
                text = read_text(file);
            } catch (const std::exception& e) {
                throw EntryError(out_rel, e.what());
            }
            const auto digests = m.value("output_sha256", Json::object());
            if (!digests.contains(name) || digests[name] != sha256_hex(text)) verified = false;
            if (name.ends_with(".json")) {
                try {
                    results[name] = Json::parse(text);
                } catch (const nlohmann::json::exception& e) {
                    throw EntryError(out_rel, std::string("malformed JSON: ") + e.what());
                }
            }
        }
        Json body;
        body["manifest"] = rel;
        body["command"] = m.value("command", "");
        body["timestamp"] = m["timestamp"];
        body["config_hash"] = m.value("config_hash", "");
        body["seed"] = m.value("seed", Json(nullptr));
        body["config"] = m.value("config", Json::object());
        body["outputs_verified"] = verified;
        body["results"] = std::move(results);
        return {m["timestamp"].get<std::string>(), rel, std::move(body)};
    }

    fs::path dir_ = ".";
    std::optional<fs::path> out_file_;
};

}  // namespace

std::unique_ptr<Command> make_report() { return std::make_unique<Report>(); }

}  // namespace zipfirm::cli
