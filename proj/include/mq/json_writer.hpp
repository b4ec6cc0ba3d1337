#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mq {

// Streaming JSON emitter with fixed field order; doubles at 17 significant
// digits, non-finite doubles as null.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& null();

    const std::string& str() const { return out_; }

private:
    void separate();
    void write_string(std::string_view v);
    std::string out_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

std::string format_double(double v);

}  // namespace mq
