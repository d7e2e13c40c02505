#pragma once

// Tiny scanner shared by the canonical-text parsers. Understands the UTF-8
// glyphs the printers emit (U+2212 minus, U+00B7 middle dot, U+2265) along
// with their ASCII fallbacks.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string_view>

#include "elc/errors.hpp"

namespace elc::detail {

inline constexpr std::string_view kMinus = "\xE2\x88\x92";
inline constexpr std::string_view kDot = "\xC2\xB7";
inline constexpr std::string_view kGeq = "\xE2\x89\xA5";

class TextCursor {
public:
    TextCursor(std::string_view text, const char* what) : text_(text), what_(what) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool done() {
        skip_space();
        return pos_ >= text_.size();
    }

    std::size_t pos() const noexcept { return pos_; }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    bool accept_minus() { return accept(kMinus) || accept("-"); }
    bool accept_times() { return accept(kDot) || accept("*"); }

    void expect(std::string_view token) {
        if (!accept(token)) fail(std::string("expected '") + std::string(token) + "'");
    }

    bool peek_digit() {
        skip_space();
        return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
    }

    std::int64_t integer() {
        skip_space();
        std::int64_t value = 0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc::result_out_of_range) fail("integer out of range");
        if (ec != std::errc() || ptr == first) fail("expected integer");
        pos_ += static_cast<std::size_t>(ptr - first);
        return value;
    }

    std::int64_t signed_integer() {
        bool negative = accept_minus();
        std::int64_t v = integer();
        return negative ? -v : v;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("parse_error", std::string(what_) + ": " + message, pos_);
    }

private:
    std::string_view text_;
    const char* what_;
    std::size_t pos_ = 0;
};

}  // namespace elc::detail
