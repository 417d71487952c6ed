// End-to-end checks of the sqzkit binary: exit codes, report fields,
// reproducibility of file outputs.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const fs::path capture =
        fs::temp_directory_path() / "sqzkit_cli_capture.txt";
    const std::string command = std::string(SQZKIT_CLI_PATH) + " " + args +
                                " > " + capture.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(capture);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    fs::remove(capture);
    return result;
}

std::string measured_config() {
    return std::string(SQZKIT_SOURCE_DIR) + "/configs/opo_860nm.conf";
}

// value of a 'key = value' report line
double field_value(const std::string& output, const std::string& key) {
    const std::string needle = key + " = ";
    const auto pos = output.find(needle);
    REQUIRE_MESSAGE(pos != std::string::npos, "missing field: " << key);
    return std::stod(output.substr(pos + needle.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class TempFile {
public:
    TempFile(const std::string& name, const std::string& content)
        : path_(fs::temp_directory_path() / ("sqzkit_cli_" + name)) {
        std::ofstream out(path_);
        out << content;
    }
    ~TempFile() { fs::remove(path_); }
    std::string path() const { return path_.string(); }

private:
    fs::path path_;
};

}  // namespace

TEST_CASE("predict reproduces the published observation at 100 mW") {
    const RunResult r =
        run_cli("predict --config " + measured_config() + " --power-mw 100");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "observed_squeezed_db") - (-9.01)) <
          0.5);
    CHECK(std::abs(field_value(r.output, "observed_antisqueezed_db") - 15.12) <
          0.5);
    CHECK(std::abs(field_value(r.output, "x") - 0.745356) < 1e-5);
    CHECK(r.output.find("columns:") != std::string::npos);
    CHECK(r.output.find("values:") != std::string::npos);
    CHECK(r.output.find("freq_convention = angular") != std::string::npos);
}

TEST_CASE("predict at zero pump sits at shot noise") {
    const RunResult r =
        run_cli("predict --config " + measured_config() + " --power-mw 0");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "observed_squeezed_db")) < 1e-3);
    CHECK(std::abs(field_value(r.output, "observed_antisqueezed_db")) < 1e-3);
}

TEST_CASE("predict above threshold exits with the domain code") {
    const RunResult r =
        run_cli("predict --config " + measured_config() + " --power-mw 200");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("threshold") != std::string::npos);
}

TEST_CASE("predict usage errors") {
    const RunResult none = run_cli("predict --config " + measured_config());
    CHECK(none.exit_code == 1);
    const RunResult both = run_cli("predict --config " + measured_config() +
                                   " --power-mw 100 --x 0.5");
    CHECK(both.exit_code == 1);
    const RunResult no_sub = run_cli("");
    CHECK(no_sub.exit_code == 1);
}

TEST_CASE("malformed config exits 1 and names the field") {
    const TempFile bad("bad.conf",
                       "transmittance = 1.9\nround_trip_length_m = 0.5\n"
                       "loss_fixed = 0\neta = 1\nxi = 1\nzeta = 1\n"
                       "phase_rms_deg = 0\nmeasurement_freq_hz = 1e6\n");
    const RunResult r =
        run_cli("predict --config " + bad.path() + " --x 0.5");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("transmittance") != std::string::npos);
}

TEST_CASE("fit-threshold from a single measured point") {
    const TempFile table("gain1.csv", "power_mw,gain\n100,18.7\n");
    const RunResult r = run_cli("fit-threshold --table " + table.path());
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "threshold_mw") - 169.2) < 0.5);
    CHECK(r.output.find("sigma_mw = none") != std::string::npos);
}

TEST_CASE("fit-threshold round trip on synthetic data") {
    std::ostringstream table;
    table << "power_mw,gain\n";
    for (double p : {10.0, 20.0, 50.0, 65.0, 90.0, 100.0, 120.0, 130.0, 150.0}) {
        const double u = std::sqrt(p / 180.0);
        table << p << ',' << 1.0 / ((1.0 - u) * (1.0 - u)) << '\n';
    }
    const TempFile file("gain9.csv", table.str());
    const RunResult r = run_cli("fit-threshold --table " + file.path() +
                                " --precision 12");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "threshold_mw") - 180.0) < 0.18);
}

TEST_CASE("fit-threshold malformed header names the line") {
    const TempFile table("bad_gain.csv", "watts,gain\n100,18.7\n");
    const RunResult r = run_cli("fit-threshold --table " + table.path());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find(":1:") != std::string::npos);
}

TEST_CASE("fit-loss recovers the measured line") {
    const TempFile table("loss.csv", "x,loss\n0,0.002\n0.3,0.0026\n0.6,0.0032\n");
    const RunResult r =
        run_cli("fit-loss --table " + table.path() + " --precision 10");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "loss_intercept") - 0.002) < 1e-9);
    CHECK(std::abs(field_value(r.output, "loss_slope") - 0.002) < 1e-9);
}

TEST_CASE("correct inverts the published pair with uncertainties") {
    const RunResult r = run_cli(
        "correct --config " + measured_config() +
        " --squeezed-db -9.01 --antisqueezed-db 15.12"
        " --squeezed-sigma-db 0.14 --antisqueezed-sigma-db 0.14"
        " --power-mw 100 --samples 5000 --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "corrected_squeezed_db") - (-9.22)) <
          0.005);
    CHECK(std::abs(field_value(r.output, "corrected_antisqueezed_db") - 15.15) <
          0.005);
    CHECK(std::abs(field_value(r.output, "generated_squeezed_db") - (-10.12)) <
          0.02);
    CHECK(std::abs(field_value(r.output, "total_loss_squeezed_side") - 0.0709) <
          0.008);
    // with the loss line the product uses L(0.745) = 0.00414, not 0.0038
    CHECK(std::abs(field_value(r.output, "total_loss_measured_product") -
                   0.066990) < 1e-3);
    CHECK(std::abs(field_value(r.output, "generated_squeezed_db_sigma") - 0.18) <
          0.05);
    // the two single-side loss estimates disagree on this data; both are reported
    CHECK(std::abs(field_value(r.output, "total_loss_antisqueezed_side") -
                   field_value(r.output, "total_loss_squeezed_side")) > 0.04);
}

TEST_CASE("correct with zero jitter returns the corrected pair unchanged") {
    const TempFile config("zero_jitter.conf",
                          "transmittance = 0.123\nround_trip_length_m = 0.5\n"
                          "loss_fixed = 0.0038\nthreshold_mw = 180\n"
                          "eta = 0.998\nxi = 0.988\nzeta = 0.99\n"
                          "phase_rms_deg = 0\ncircuit_noise_db = -21.7\n"
                          "measurement_freq_hz = 1e6\n");
    const RunResult r = run_cli("correct --config " + config.path() +
                                " --squeezed-db -9.01 --antisqueezed-db 15.12"
                                " --power-mw 100");
    REQUIRE(r.exit_code == 0);
    CHECK(field_value(r.output, "corrected_squeezed_db") ==
          field_value(r.output, "generated_squeezed_db"));
}

TEST_CASE("correct rejects an observation below the floor") {
    const RunResult r = run_cli("correct --config " + measured_config() +
                                " --squeezed-db -25 --antisqueezed-db 15.12"
                                " --power-mw 100");
    CHECK(r.exit_code == 2);
}

TEST_CASE("correct reads the level table") {
    const TempFile table("levels.csv",
                         "quadrature,level_db,sigma_db\n"
                         "squeezed,-9.01,0.14\nantisqueezed,15.12,0.14\n");
    const RunResult r =
        run_cli("correct --config " + measured_config() + " --table " +
                table.path() + " --gain 18.7 --samples 2000");
    REQUIRE(r.exit_code == 0);
    // x from gain: 1 - 1/sqrt(18.7)
    CHECK(std::abs(field_value(r.output, "x") - 0.768750) < 1e-5);
}

TEST_CASE("optimize reports the interior optimum") {
    const RunResult r = run_cli("optimize --config " + measured_config());
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(field_value(r.output, "x_opt") - 0.758332) < 1e-3);
    CHECK(std::abs(field_value(r.output, "best_squeezed_db") - (-9.135)) < 0.01);
    CHECK(field_value(r.output, "boundary") == 0.0);
}

TEST_CASE("optimize flags a boundary optimum") {
    // zero jitter with pump-independent loss keeps improving to threshold
    const TempFile config("boundary.conf",
                          "transmittance = 0.123\nround_trip_length_m = 0.5\n"
                          "loss_fixed = 0.0038\neta = 0.998\nxi = 0.988\n"
                          "zeta = 0.99\nphase_rms_deg = 0\n"
                          "circuit_noise_db = -21.7\n"
                          "measurement_freq_hz = 1e6\n");
    const RunResult r = run_cli("optimize --config " + config.path());
    REQUIRE(r.exit_code == 0);
    CHECK(field_value(r.output, "boundary") == 1.0);
    CHECK(r.output.find("no interior optimum") != std::string::npos);
}

TEST_CASE("sweep writes a reproducible table") {
    const fs::path out_a = fs::temp_directory_path() / "sqzkit_sweep_a.csv";
    const fs::path out_b = fs::temp_directory_path() / "sqzkit_sweep_b.csv";
    const std::string args = "sweep --config " + measured_config() +
                             " --x-min 0 --x-max 0.9 --x-steps 10 --out ";
    REQUIRE(run_cli(args + out_a.string()).exit_code == 0);
    REQUIRE(run_cli(args + out_b.string()).exit_code == 0);
    const std::string a = read_file(out_a.string());
    CHECK(a == read_file(out_b.string()));
    CHECK(a.find("# command = sweep") != std::string::npos);
    CHECK(a.find("# freq_convention = angular") != std::string::npos);
    CHECK(a.find("x,squeezed_db,antisqueezed_db,generated_squeezed_db,"
                 "generated_antisqueezed_db") != std::string::npos);
    fs::remove(out_a);
    fs::remove(out_b);
}

TEST_CASE("sweep to an unwritable path exits 3") {
    const RunResult r = run_cli("sweep --config " + measured_config() +
                                " --out /nonexistent_dir/sweep.csv");
    CHECK(r.exit_code == 3);
}

TEST_CASE("convention override is recorded in the output") {
    const RunResult r = run_cli("predict --config " + measured_config() +
                                " --power-mw 100 --convention cyclic");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("freq_convention = cyclic") != std::string::npos);
    // loss line evaluated at x = sqrt(100/180), cyclic scaling
    CHECK(std::abs(field_value(r.output, "normalized_frequency") - 0.0131175) <
          1e-5);
}

TEST_CASE("mc runs are reproducible for a fixed seed") {
    const fs::path out_a = fs::temp_directory_path() / "sqzkit_mc_a.csv";
    const fs::path out_b = fs::temp_directory_path() / "sqzkit_mc_b.csv";
    const std::string args = "mc --config " + measured_config() +
                             " --power-mw 100 --samples 200000 --seed 9 --out ";
    REQUIRE(run_cli(args + out_a.string()).exit_code == 0);
    REQUIRE(run_cli(args + out_b.string()).exit_code == 0);
    const std::string a = read_file(out_a.string());
    CHECK(a == read_file(out_b.string()));
    CHECK(a.find("# rng = ") != std::string::npos);
    CHECK(a.find("squeezed,") != std::string::npos);
    fs::remove(out_a);
    fs::remove(out_b);

    const fs::path out_c = fs::temp_directory_path() / "sqzkit_mc_c.csv";
    REQUIRE(run_cli("mc --config " + measured_config() +
                    " --power-mw 100 --samples 200000 --seed 10 --out " +
                    out_c.string())
                .exit_code == 0);
    CHECK(a != read_file(out_c.string()));
    fs::remove(out_c);
}

TEST_CASE("surface emits the grid and the loss-line path") {
    const fs::path grid = fs::temp_directory_path() / "sqzkit_surface.csv";
    const fs::path path = fs::temp_directory_path() / "sqzkit_path.csv";
    const RunResult r = run_cli(
        "surface --config " + measured_config() +
        " --theta-min 0 --theta-max 3 --theta-steps 4"
        " --loss-min 0.001 --loss-max 0.005 --loss-steps 3"
        " --follow-line --out " + grid.string() + " --path-out " + path.string());
    REQUIRE(r.exit_code == 0);
    const std::string grid_text = read_file(grid.string());
    CHECK(grid_text.find("theta_deg,loss,best_squeezed_db,x_opt,boundary") !=
          std::string::npos);
    const std::string path_text = read_file(path.string());
    CHECK(path_text.find("theta_deg,x_opt,loss_at_x_opt,best_squeezed_db,"
                         "boundary") != std::string::npos);
    fs::remove(grid);
    fs::remove(path);
}
