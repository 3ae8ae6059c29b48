#include <doctest.h>

#include "lek/errors.hpp"
#include "lek/io.hpp"

TEST_CASE("domain JSON round trip") {
    using lek::io::domain_from_json;
    using lek::io::domain_to_json;
    const auto cases = {
        R"({"type":"interval","a":-1.0,"b":1.0})",
        R"({"type":"box","min":[-1.0,-1.0],"max":[1.0,1.0]})",
        R"({"type":"disk","center":[0.25,-0.5],"radius":2.0})",
        R"({"type":"polygon","vertices":[[0.0,0.0],[4.0,0.0],[0.0,3.0]]})",
    };
    for (const auto* text : cases) {
        const auto j = nlohmann::json::parse(text);
        const auto dom = domain_from_json(j);
        CHECK(domain_to_json(dom) == j);
    }
    CHECK_THROWS_AS(domain_from_json(nlohmann::json{{"type", "blob"}}), lek::ParameterError);
    CHECK_THROWS_AS(domain_from_json(nlohmann::json{{"type", "disk"}}), lek::ParameterError);
}

TEST_CASE("verification report JSON schema") {
    lek::verify::VerifyReport rep;
    rep.check = "hersch-protter";
    rep.pass = true;
    rep.worst = 1.63;
    rep.tol = 0.02;
    rep.h = 0.01;
    rep.p = 2.0;
    rep.q = 1.0;
    rep.alpha = 1.0;
    rep.domain_id = "disk(0,0;r=1)";
    rep.extra["ratio"] = 2.63;
    const auto j = lek::io::report_to_json(rep);
    for (const char* key : {"check", "pass", "worst", "tol", "h", "p", "q", "alpha", "domain"})
        CHECK(j.contains(key));
    CHECK(j["pass"].get<bool>() == (j["worst"].get<double>() >= -j["tol"].get<double>()));
    CHECK(j["extra"]["ratio"].get<double>() == doctest::Approx(2.63));
}
