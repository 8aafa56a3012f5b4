#pragma once

#include <string>

#include "sls/config_model.hpp"
#include "sls/io.hpp"

namespace sls::test {

inline std::string data_path(const std::string& relative) {
    return std::string(SLS_TEST_DATA_DIR) + "/" + relative;
}

inline std::string read_fixture(const std::string& relative) {
    return read_file(data_path(relative));
}

inline ConfigDocument load_canonical_fixture() {
    return parse_template(read_fixture("fixtures/s3_event_lambda.yaml"), "s3_event_lambda.yaml");
}

}  // namespace sls::test
