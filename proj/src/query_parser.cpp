#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "revex/query.hpp"

namespace revex::query {

namespace {

constexpr const char* kValidNames = "tSort, tFilter, tGrep, tColor, tReset";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool attr_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
}

std::string lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

std::string escape_regex(std::string_view literal) {
    std::string out;
    for (char c : literal) {
        if (std::string_view(R"(\^$.|?*+()[]{})").find(c) != std::string_view::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

class Parser {
public:
    Parser(std::string_view input, const std::vector<std::string>& attributes)
        : in_(input), attributes_(attributes) {}

    Command run() {
        skip_ws();
        if (eof()) fail("empty command", pos_);
        const std::size_t name_pos = pos_;
        if (!ident_start(peek())) fail("expected a command name", pos_);
        std::string name;
        while (!eof() && ident_char(peek())) name.push_back(in_[pos_++]);
        skip_ws();
        if (name != "tSort" && name != "tFilter" && name != "tGrep" && name != "tColor" && name != "tReset") {
            fail("unknown command '" + name + "'; valid commands: " + kValidNames, name_pos);
        }
        expect('(', "expected '(' after " + name);

        Command cmd;
        if (name == "tSort") {
            Sort s;
            s.attribute = attribute(name, "1 or 2");
            if (accept(',')) {
                skip_ws();
                const std::size_t at = pos_;
                const std::string dir = lower(word());
                if (dir == "asc") {
                    s.direction = Direction::Asc;
                } else if (dir == "desc") {
                    s.direction = Direction::Desc;
                } else {
                    fail("sort direction must be asc or desc, got '" + dir + "'", at);
                }
            }
            close(name, "1 or 2");
            cmd.op = s;
        } else if (name == "tFilter") {
            Filter f;
            f.attribute = attribute(name, "2");
            if (!accept(',')) {
                skip_ws();
                if (peek() == ')') fail("tFilter expects 2 arguments (attribute, comparison), got 1", pos_);
                fail("expected ',' after attribute", pos_);
            }
            f.comparator = comparator();
            f.value = number();
            close(name, "2");
            cmd.op = f;
        } else if (name == "tGrep") {
            cmd.op = grep();
            close(name, "1");
        } else if (name == "tColor") {
            cmd.op = Color{attribute(name, "1")};
            close(name, "1");
        } else {
            skip_ws();
            if (peek() != ')') fail("tReset expects 0 arguments", pos_);
            ++pos_;
            cmd.op = Reset{};
        }
        skip_ws();
        if (!eof()) fail("unexpected trailing input", pos_);
        cmd.source = std::string(in_);
        return cmd;
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t at) const { throw ParseError(message, at); }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return eof() ? '\0' : in_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const std::string& message) {
        if (!accept(c)) fail(message, pos_);
    }

    void close(const std::string& name, const char* arity) {
        skip_ws();
        if (peek() == ',') fail(name + " expects " + arity + " argument(s); too many arguments", pos_);
        if (eof()) fail("missing ')'", pos_);
        if (peek() != ')') fail("expected ')'", pos_);
        ++pos_;
    }

    std::string word() {
        skip_ws();
        std::string w;
        while (!eof() && attr_char(peek())) w.push_back(in_[pos_++]);
        return w;
    }

    std::string quoted() {
        // at opening quote
        const std::size_t start = pos_;
        ++pos_;
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string literal", start);
            char c = in_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated string literal", start);
                c = in_[pos_++];
            }
            out.push_back(c);
        }
        return out;
    }

    AttributeRef attribute(const std::string& command, const char* arity) {
        skip_ws();
        const std::size_t at = pos_;
        if (peek() == ')') fail(command + " expects " + arity + " argument(s), got 0", at);
        std::string name = peek() == '"' ? quoted() : word();
        if (name.empty()) fail("expected an attribute name", at);
        name = lower(name);
        if (name == "sentiment") return {AttributeRef::Kind::Sentiment, 0, name};
        if (name == "length") return {AttributeRef::Kind::Length, 0, name};
        auto it = std::find(attributes_.begin(), attributes_.end(), name);
        if (it == attributes_.end()) {
            std::string known;
            for (const auto& a : attributes_) known += (known.empty() ? "" : ", ") + a;
            fail("unknown attribute '" + name + "'; schema: [" + known + "] plus sentiment, length", at);
        }
        return {AttributeRef::Kind::Schema, static_cast<std::size_t>(it - attributes_.begin()), name};
    }

    Comparator comparator() {
        skip_ws();
        const std::size_t at = pos_;
        auto two = in_.substr(pos_, 2);
        if (two == "<=") { pos_ += 2; return Comparator::LessEqual; }
        if (two == ">=") { pos_ += 2; return Comparator::GreaterEqual; }
        if (two == "==") { pos_ += 2; return Comparator::Equal; }
        if (two == "!=") { pos_ += 2; return Comparator::NotEqual; }
        if (peek() == '<') { ++pos_; return Comparator::Less; }
        if (peek() == '>') { ++pos_; return Comparator::Greater; }
        fail("expected a comparison operator (<, <=, >, >=, ==, !=)", at);
    }

    double number() {
        skip_ws();
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < in_.size() && (std::isalnum(static_cast<unsigned char>(in_[end])) || in_[end] == '.' ||
                                    in_[end] == '-' || in_[end] == '+')) {
            ++end;
        }
        const auto text = in_.substr(pos_, end - pos_);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
            fail("expected a number", at);
        }
        pos_ = end;
        return value;
    }

    Grep grep() {
        skip_ws();
        const std::size_t at = pos_;
        Grep g;
        if (peek() == ')') fail("tGrep expects 1 argument, got 0", at);
        if (peek() == '/') {
            ++pos_;
            std::string source;
            while (true) {
                if (eof()) fail("unterminated regular expression", at);
                char c = in_[pos_++];
                if (c == '/') break;
                if (c == '\\' && !eof() && in_[pos_] == '/') {
                    source.push_back('/');
                    ++pos_;
                    continue;
                }
                source.push_back(c);
                if (c == '\\' && !eof()) source.push_back(in_[pos_++]);
            }
            g.case_insensitive = false;
            while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) {
                const char flag = in_[pos_];
                if (flag != 'i') fail(std::string("unsupported regex flag '") + flag + "'", pos_);
                g.case_insensitive = true;
                ++pos_;
            }
            g.pattern = std::move(source);
        } else if (peek() == '"') {
            g.pattern = escape_regex(quoted());
            g.case_insensitive = true;
        } else {
            fail("tGrep expects /regex/ or \"literal\"", at);
        }
        if (g.pattern.empty()) fail("empty search pattern", at);
        try {
            auto flags = std::regex::ECMAScript | std::regex::optimize;
            if (g.case_insensitive) flags |= std::regex::icase;
            g.regex = std::make_shared<const std::regex>(g.pattern, flags);
        } catch (const std::regex_error& e) {
            fail(std::string("invalid regular expression: ") + e.what(), at);
        }
        return g;
    }

    std::string_view in_;
    const std::vector<std::string>& attributes_;
    std::size_t pos_ = 0;
};

const char* comparator_text(Comparator c) {
    switch (c) {
        case Comparator::Less: return "<";
        case Comparator::LessEqual: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEqual: return ">=";
        case Comparator::Equal: return "==";
        case Comparator::NotEqual: return "!=";
    }
    return "?";
}

}  // namespace

Command parse(std::string_view input, const std::vector<std::string>& attributes) {
    return Parser(input, attributes).run();
}

bool Grep::matches(const std::string& text) const { return regex && std::regex_search(text, *regex); }

std::string Command::to_string() const {
    struct Visitor {
        std::string operator()(const Sort& s) const {
            return "tSort(" + s.attribute.name + ", " + (s.direction == Direction::Asc ? "asc" : "desc") + ")";
        }
        std::string operator()(const Filter& f) const {
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof buf, f.value);
            return "tFilter(" + f.attribute.name + ", " + comparator_text(f.comparator) + " " +
                   std::string(buf, res.ptr) + ")";
        }
        std::string operator()(const Grep& g) const {
            std::string escaped;
            for (char c : g.pattern) {
                if (c == '/') escaped.push_back('\\');
                escaped.push_back(c);
            }
            return "tGrep(/" + escaped + "/" + (g.case_insensitive ? "i" : "") + ")";
        }
        std::string operator()(const Color& c) const { return "tColor(" + c.attribute.name + ")"; }
        std::string operator()(const Reset&) const { return "tReset()"; }
    };
    return std::visit(Visitor{}, op);
}

}  // namespace revex::query
