#pragma once

#include <string>
#include <vector>

namespace cfm {

// Deterministic streaming JSON writer: caller-controlled key order and fixed
// %.17g float formatting, so identical inputs serialize byte-identically.
class JsonWriter {
public:
    std::string str() const { return out_; }

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long long v);
    JsonWriter& value(size_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v);
    JsonWriter& raw_newline();  // cosmetic line break between top-level entries

private:
    void prefix();
    std::string out_;
    std::vector<char> stack_;  // 'o' or 'a'
    bool need_comma_ = false;
    bool have_key_ = false;
};

std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cfm
