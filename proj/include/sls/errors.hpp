#pragma once

#include <stdexcept>
#include <string>

namespace sls {

// Parse failure with source position (1-based line/column).
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string message, int line, int column)
        : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class EmptyTemplate : public std::runtime_error {
public:
    EmptyTemplate() : std::runtime_error("template has no top-level mapping") {}
};

class EmptyConfig : public std::runtime_error {
public:
    EmptyConfig() : std::runtime_error("configuration text is empty") {}
};

class CacheMiss : public std::runtime_error {
public:
    explicit CacheMiss(const std::string& request_id)
        : std::runtime_error("replay cache has no entry for request " + request_id) {}
};

class AuthError : public std::runtime_error {
public:
    explicit AuthError(const std::string& env_var)
        : std::runtime_error("credential environment variable " + env_var + " is not set") {}
};

class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& detail)
        : std::runtime_error("transport failure: " + detail) {}
};

class ProviderError : public std::runtime_error {
public:
    ProviderError(int status, const std::string& body)
        : std::runtime_error("provider returned status " + std::to_string(status) + ": " + body),
          status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

class InvalidAlpha : public std::runtime_error {
public:
    explicit InvalidAlpha(double alpha)
        : std::runtime_error("support fraction must be in (0, 1], got " + std::to_string(alpha)) {}
};

class NoEligibleParameter : public std::runtime_error {
public:
    explicit NoEligibleParameter(const std::string& subcategory)
        : std::runtime_error("document has no eligible parameter for subcategory " + subcategory) {}
};

class TruthPathMissing : public std::runtime_error {
public:
    explicit TruthPathMissing(const std::string& path)
        : std::runtime_error("ground truth references unknown parameter " + path) {}
};

class EmptyDataset : public std::runtime_error {
public:
    EmptyDataset() : std::runtime_error("dataset manifest has no entries") {}
};

class EmptyCorpus : public std::runtime_error {
public:
    EmptyCorpus() : std::runtime_error("corpus contains no parseable template") {}
};

}  // namespace sls
