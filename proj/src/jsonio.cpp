#include "cfm/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfm/common.hpp"

namespace cfm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::prefix() {
    if (have_key_) {
        have_key_ = false;
        return;
    }
    if (need_comma_) out_ += ',';
}

JsonWriter& JsonWriter::begin_object() {
    prefix();
    out_ += '{';
    stack_.push_back('o');
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    stack_.pop_back();
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    prefix();
    out_ += '[';
    stack_.push_back('a');
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    stack_.pop_back();
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    if (need_comma_) out_ += ',';
    out_ += '"';
    out_ += k;
    out_ += "\":";
    need_comma_ = false;
    have_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    prefix();
    out_ += format_double(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    prefix();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    prefix();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(size_t v) {
    prefix();
    out_ += std::to_string(v);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    prefix();
    out_ += v ? "true" : "false";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    prefix();
    out_ += '"';
    for (char c : v) {
        if (c == '"' || c == '\\') out_ += '\\';
        out_ += c;
    }
    out_ += '"';
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::raw_newline() {
    out_ += '\n';
    return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-error", "cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cfm
