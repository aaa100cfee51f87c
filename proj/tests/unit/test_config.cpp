#include "doctest.h"

#include <cmath>
#include <string>

#include "ionheat/config.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"

using namespace ionheat;
namespace kc = ionheat::constants;

namespace {

const char* kFullConfig = R"(# reference parameter set
[ion]
mass = 170.936331 amu
wavelength = 369.5 nm
linewidth = 19.6 MHz
zeeman_splitting = 5.288 MHz

[trap]
frequency = 1.09 MHz
eta_x = 0.104
eta_y = 0.112
mode_ratio = 1.48

[laser]
saturation = 1.27
detuning = 0 Hz
absorption_geometry = 0.25
scatter_duration = 1 ms

[run]
seed = 7

[initial]
kind = ground
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("frequencies require an explicit unit") {
    const Config c = Config::parse_string("[a]\nf = 1.09 MHz\ng = 6846017.54 rad/s\nh = 3.2\n");
    CHECK(c.frequency("a", "f") == doctest::Approx(kc::two_pi * 1.09e6).epsilon(1e-12));
    CHECK(c.frequency("a", "g") == doctest::Approx(6846017.54).epsilon(1e-12));
    CHECK_THROWS_AS(c.frequency("a", "h"), ConfigError);

    const Config bad = Config::parse_string("[a]\nf = 10 parsec\n");
    CHECK_THROWS_AS(bad.frequency("a", "f"), ConfigError);
}

TEST_CASE("frequency equivalence between plain and angular units") {
    const Config c = Config::parse_string("[a]\nhz = 1 MHz\nrad = 6283185.307179586 rad/s\n");
    CHECK(c.frequency("a", "hz") == doctest::Approx(c.frequency("a", "rad")).epsilon(1e-12));
}

TEST_CASE("times lengths and masses") {
    const Config c = Config::parse_string(
        "[a]\nt1 = 300 us\nt2 = 1 ms\nt3 = 2.5\nl1 = 369.5 nm\nm1 = 170.936331 amu\nm2 = 1e-25 kg\n");
    CHECK(c.time_s("a", "t1") == doctest::Approx(3e-4));
    CHECK(c.time_s("a", "t2") == doctest::Approx(1e-3));
    CHECK(c.time_s("a", "t3") == doctest::Approx(2.5));
    CHECK(c.length_m("a", "l1") == doctest::Approx(3.695e-7));
    CHECK(c.mass_kg("a", "m1") == doctest::Approx(170.936331 * kc::atomic_mass_unit));
    CHECK(c.mass_kg("a", "m2") == doctest::Approx(1e-25));
}

TEST_CASE("lists") {
    const Config c = Config::parse_string("[scan]\ndetunings = -11 MHz, -1 MHz, 9 MHz\nss = 1.27, 1.0\n");
    const std::vector<double> d = c.frequency_list("scan", "detunings");
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(-kc::two_pi * 11e6));
    CHECK(d[2] == doctest::Approx(kc::two_pi * 9e6));
    const std::vector<double> s = c.number_list("scan", "ss");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == 1.0);
}

TEST_CASE("parse diagnostics carry the origin and line") {
    try {
        Config::parse_string("[a]\nx 3\n", "my.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("my.ini:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse_string("x = 3\n"), ConfigError);       // key outside section
    CHECK_THROWS_AS(Config::parse_string("[a\nx = 3\n"), ConfigError);   // broken header
    CHECK_THROWS_AS(Config::parse_string("[a]\nx = 1\nx = 2\n"), ConfigError);  // duplicate

    const Config c = Config::parse_string("[a]\nx = 3\n", "my.ini");
    try {
        c.number("b", "y");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("[b]") != std::string::npos);
    }
}

TEST_CASE("serialization round trip is idempotent") {
    // Different formatting and section order, same content.
    const Config a = Config::parse_string("[b]\nz   =  2 ms\n[a]\nx = 1\ny = hello\n");
    const Config b = Config::parse_string(a.serialize());
    CHECK(a == b);
    CHECK(a.serialize() == b.serialize());
    CHECK(a.hash() == b.hash());

    const Config reordered = Config::parse_string("[a]\ny = hello\nx = 1\n[b]\nz = 2 ms\n");
    CHECK(reordered.hash() == a.hash());

    const Config different = Config::parse_string("[a]\nx = 2\ny = hello\n[b]\nz = 2 ms\n");
    CHECK(different.hash() != a.hash());
}

TEST_CASE("run config assembles validated parameter blocks") {
    const RunConfig rc = run_config_from(Config::parse_string(kFullConfig));
    CHECK(rc.species.natural_linewidth == doctest::Approx(kc::two_pi * 19.6e6));
    CHECK(rc.species.wavevector() == doctest::Approx(kc::two_pi / 369.5e-9));
    CHECK(rc.trap.secular_frequency == doctest::Approx(kc::two_pi * 1.09e6));
    CHECK(rc.trap.mode_frequency_ratio == 1.48);
    CHECK(rc.laser.saturation == 1.27);
    CHECK(rc.seed == 7);

    CHECK_THROWS_AS(run_config_from(Config::parse_string("[ion]\nmass = 1 amu\n")), ConfigError);
}

TEST_CASE("initial state blocks") {
    const Config ground = Config::parse_string("[initial]\nkind = ground\nlevels = 50\n");
    CHECK(initial_state_from_config(ground)[0] == 1.0);

    const Config thermal = Config::parse_string("[initial]\nkind = thermal\nnbar = 0.5\n");
    CHECK(initial_state_from_config(thermal).mean() == doctest::Approx(0.5).epsilon(1e-9));

    const Config dt = Config::parse_string(
        "[initial]\nkind = double_thermal\np0 = 0.9\np1 = 0.08\nfixed = hot_nbar\nhot_nbar = 10\nlevels = 100\n");
    const FockDistribution d = initial_state_from_config(dt);
    CHECK(d[0] == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(d[1] == doctest::Approx(0.08).epsilon(1e-9));

    const Config bad = Config::parse_string("[initial]\nkind = squeezed\n");
    CHECK_THROWS_AS(initial_state_from_config(bad), ConfigError);
}

}  // TEST_SUITE
