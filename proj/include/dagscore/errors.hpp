#pragma once

#include <stdexcept>
#include <string>

namespace dagscore {

// Exit code 2: malformed input (bad config, bad matrix shape, invalid flag combination).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit code 3: numerical failure (singular factorization, out-of-domain constraint value).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit code 4: request exceeds a hard capacity limit (exact search dimension cap).
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dagscore
