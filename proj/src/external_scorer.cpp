#include "ngsp/external.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "ngsp/errors.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

std::string format_query_file(const Grammar& g, const std::string& shape_id,
                              const std::vector<ScorerQuery>& queries) {
    std::string out;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const ScorerQuery& q = queries[qi];
        out += std::to_string(qi);
        out += '\t';
        out += shape_id;
        out += '\t';
        out += query_kind_name(q.kind);
        out += '\t';
        out += g.label_name(q.label);
        out += '\t';
        for (std::size_t i = 0; i < q.regions.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(q.regions[i]);
        }
        out += '\t';
        if (q.child_tags.empty()) {
            out += '-';
        } else {
            for (std::size_t i = 0; i < q.child_tags.size(); ++i) {
                if (i) out += ',';
                out += g.label_name(q.child_tags[i]);
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<double> parse_response_file(std::string_view text, std::size_t expected) {
    std::vector<double> values(expected, 0.0);
    std::vector<bool> seen(expected, false);
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto tok = split_ws(line);
        if (tok.size() != 2)
            throw ScorerError("malformed response line: '" + std::string(line) + "'");
        long long qid = 0;
        auto res = std::from_chars(tok[0].data(), tok[0].data() + tok[0].size(), qid);
        if (res.ec != std::errc{} || qid < 0 || static_cast<std::size_t>(qid) >= expected)
            throw ScorerError("unknown query id in response: '" + std::string(tok[0]) + "'");
        if (seen[static_cast<std::size_t>(qid)])
            throw ScorerError("DuplicateResponse: query id " + std::to_string(qid) +
                              " answered twice");
        double v = 0.0;
        auto vres = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), v);
        if (vres.ec != std::errc{})
            throw ScorerError("malformed score for query " + std::to_string(qid));
        if (!(v >= 0.0 && v <= 1.0))
            throw ScorerError("ScoreOutOfRange: query " + std::to_string(qid) + " scored " +
                              std::string(tok[1]));
        values[static_cast<std::size_t>(qid)] = v;
        seen[static_cast<std::size_t>(qid)] = true;
    }
    for (std::size_t i = 0; i < expected; ++i)
        if (!seen[i])
            throw ScorerError("IncompleteResponse: query id " + std::to_string(i) +
                              " unanswered");
    return values;
}

namespace {

// Runs argv with a wall-clock timeout; returns the exit code.
int run_with_timeout(const std::vector<std::string>& argv, double timeout_secs) {
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) throw ScorerError("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        execvp(cargv[0], cargv.data());
        std::perror("ngsp: exec external scorer");
        _exit(127);
    }

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_secs);
    for (;;) {
        int status = 0;
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            if (WIFEXITED(status)) return WEXITSTATUS(status);
            if (WIFSIGNALED(status))
                throw ScorerError("external scorer killed by signal " +
                                  std::to_string(WTERMSIG(status)));
            return -1;
        }
        if (r < 0) throw ScorerError("waitpid failed: " + std::string(std::strerror(errno)));
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw ScorerError("external scorer timed out after " +
                              std::to_string(timeout_secs) + " s");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

} // namespace

std::vector<double> run_external_scorer(const std::string& command, double timeout_secs,
                                        const Grammar& g, const std::string& shape_id,
                                        const std::filesystem::path& regs_path,
                                        const std::vector<ScorerQuery>& queries) {
    if (queries.empty()) return {};
    if (command.empty()) throw ScorerError("empty external scorer command");

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("ngsp-scorer-" + std::to_string(static_cast<long>(getpid())) + "-" + shape_id);
    fs::create_directories(dir);
    fs::path query_path = dir / "queries.tsv";
    fs::path response_path = dir / "scores.tsv";

    {
        std::ofstream out(query_path, std::ios::binary);
        if (!out) throw ScorerError("cannot write query file: " + query_path.string());
        out << format_query_file(g, shape_id, queries);
    }

    std::vector<std::string> argv;
    for (auto part : split_ws(command)) argv.emplace_back(part);
    argv.push_back(query_path.string());
    argv.push_back(response_path.string());
    argv.push_back(regs_path.string());

    int exit_code = run_with_timeout(argv, timeout_secs);
    if (exit_code != 0) {
        fs::remove_all(dir);
        throw ScorerError("external scorer exited with code " + std::to_string(exit_code));
    }

    std::ifstream in(response_path, std::ios::binary);
    if (!in) {
        fs::remove_all(dir);
        throw ScorerError("external scorer wrote no response file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    in.close();
    fs::remove_all(dir);
    return parse_response_file(ss.str(), queries.size());
}

} // namespace ngsp
