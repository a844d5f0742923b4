#pragma once

// Flat key=value documents ('#' starts a comment line). Covariance matrices
// are stored row-major as sigma.<row><col> with 15 significant digits, and
// optional per-entry standard errors as error.<row><col> (1-based indices).

#include "cvgauss/gaussian.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cvgauss {

inline constexpr int kDocumentFormatVersion = 1;

class KeyValueDocument {
public:
    void set(std::string key, std::string value);
    void set(std::string key, double value);
    void set(std::string key, bool value);
    void comment(std::string text);

    bool contains(const std::string& key) const;
    const std::string& get(const std::string& key) const;  ///< throws FormatError when absent
    std::optional<std::string> find(const std::string& key) const;
    double get_double(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string to_string() const;
    static KeyValueDocument parse(const std::string& text);

    void write(const std::filesystem::path& path) const;
    static KeyValueDocument read(const std::filesystem::path& path);

private:
    // Comments are stored with an empty key.
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// 15-significant-digit rendering used by every document.
std::string format_sig15(double value);

struct CmDocument {
    CovarianceMatrix cm;
    std::optional<Matrix4> errors;
    std::string config_hash;
    int format_version = kDocumentFormatVersion;
    /// Extra metadata in insertion order (scheme, physical flag, ...).
    std::vector<std::pair<std::string, std::string>> metadata;
};

KeyValueDocument to_document(const CmDocument& doc);
CmDocument cm_document_from(const KeyValueDocument& kv);

void write_cm_document(const std::filesystem::path& path, const CmDocument& doc);
CmDocument read_cm_document(const std::filesystem::path& path);

}  // namespace cvgauss
