#include "cvgauss/cm_io.hpp"

#include "cvgauss/errors.hpp"
#include "cvgauss/trace_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cvgauss {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string entry_key(const char* prefix, int i, int j) {
    return std::string(prefix) + "." + std::to_string(i + 1) + std::to_string(j + 1);
}

}  // namespace

std::string format_sig15(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    return buf;
}

void KeyValueDocument::set(std::string key, std::string value) {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
    if (it != entries_.end() && !key.empty()) {
        it->second = std::move(value);
    } else {
        entries_.emplace_back(std::move(key), std::move(value));
    }
}

void KeyValueDocument::set(std::string key, double value) { set(std::move(key), format_sig15(value)); }

void KeyValueDocument::set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

void KeyValueDocument::comment(std::string text) { entries_.emplace_back(std::string(), std::move(text)); }

bool KeyValueDocument::contains(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> KeyValueDocument::find(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (!k.empty() && k == key) return v;
    }
    return std::nullopt;
}

const std::string& KeyValueDocument::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (!k.empty() && k == key) return v;
    }
    throw FormatError("document is missing key '" + key + "'");
}

double KeyValueDocument::get_double(const std::string& key) const {
    try {
        return parse_double(get(key));
    } catch (const FormatError& e) {
        throw FormatError("key '" + key + "': " + e.what());
    }
}

std::string KeyValueDocument::to_string() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries_) {
        if (k.empty()) {
            os << "# " << v << '\n';
        } else {
            os << k << '=' << v << '\n';
        }
    }
    return os.str();
}

KeyValueDocument KeyValueDocument::parse(const std::string& text) {
    KeyValueDocument doc;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            doc.comment(trim(t.substr(1)));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": expected key=value");
        }
        doc.entries_.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return doc;
}

void KeyValueDocument::write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os << to_string();
    if (!os) throw FormatError("write failed: " + path.string());
}

KeyValueDocument KeyValueDocument::read(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

KeyValueDocument to_document(const CmDocument& doc) {
    KeyValueDocument kv;
    kv.comment("two-mode covariance matrix, R = (x1, y1, x2, y2), vacuum = I/2");
    kv.set("format-version", std::to_string(doc.format_version));
    kv.set("kind", std::string("covariance-matrix"));
    kv.set("config-hash", doc.config_hash.empty() ? std::string("none") : doc.config_hash);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) kv.set(entry_key("sigma", i, j), doc.cm(i, j));
    }
    if (doc.errors) {
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) kv.set(entry_key("error", i, j), (*doc.errors)(i, j));
        }
    }
    for (const auto& [k, v] : doc.metadata) kv.set(k, v);
    return kv;
}

CmDocument cm_document_from(const KeyValueDocument& kv) {
    CmDocument doc;
    const std::string version = kv.get("format-version");
    if (version != std::to_string(kDocumentFormatVersion)) {
        throw FormatError("unsupported document format-version " + version);
    }
    if (const auto kind = kv.find("kind"); kind && *kind != "covariance-matrix") {
        throw FormatError("document kind is '" + *kind + "', expected covariance-matrix");
    }
    Matrix4 m;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = kv.get_double(entry_key("sigma", i, j));
    }
    doc.cm = CovarianceMatrix::from_matrix(m);
    if (kv.contains("error.11")) {
        Matrix4 e;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) e(i, j) = kv.get_double(entry_key("error", i, j));
        }
        doc.errors = e;
    }
    if (const auto h = kv.find("config-hash"); h && *h != "none") doc.config_hash = *h;
    for (const auto& [k, v] : kv.entries()) {
        if (k.empty() || k == "format-version" || k == "kind" || k == "config-hash") continue;
        if (k.rfind("sigma.", 0) == 0 || k.rfind("error.", 0) == 0) continue;
        doc.metadata.emplace_back(k, v);
    }
    return doc;
}

void write_cm_document(const std::filesystem::path& path, const CmDocument& doc) {
    to_document(doc).write(path);
}

CmDocument read_cm_document(const std::filesystem::path& path) {
    return cm_document_from(KeyValueDocument::read(path));
}

}  // namespace cvgauss
