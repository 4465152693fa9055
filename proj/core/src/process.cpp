#include "csent/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "csent/errors.hpp"

namespace csent {

namespace {

void drain(int fd, std::string& sink, bool& open_flag) {
    char buf[4096];
    for (;;) {
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n > 0) {
            sink.append(buf, static_cast<std::size_t>(n));
            continue;
        }
        if (n == 0) {
            open_flag = false;
            return;
        }
        if (errno == EAGAIN || errno == EWOULDBLOCK) return;
        if (errno == EINTR) continue;
        open_flag = false;
        return;
    }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& working_dir) {
    if (argv.empty()) throw RepoAccessError("run_process: empty argv");

    int out_pipe[2];
    int err_pipe[2];
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        throw RepoAccessError(std::string("pipe failed: ") +
                              std::strerror(errno));
    }

    pid_t pid = ::fork();
    if (pid < 0) {
        throw RepoAccessError(std::string("fork failed: ") +
                              std::strerror(errno));
    }

    if (pid == 0) {
        // Child.  Any failure past this point must not return into the
        // parent's stack, so report via exit code 127 like a shell would.
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[0]);
        ::close(err_pipe[1]);
        if (!working_dir.empty() && ::chdir(working_dir.c_str()) != 0) {
            const char* msg = "chdir failed\n";
            ssize_t ignored = ::write(STDERR_FILENO, msg, std::strlen(msg));
            (void)ignored;
            ::_exit(127);
        }
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const std::string& a : argv) {
            cargv.push_back(const_cast<char*>(a.c_str()));
        }
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        const char* msg = "exec failed\n";
        ssize_t ignored = ::write(STDERR_FILENO, msg, std::strlen(msg));
        (void)ignored;
        ::_exit(127);
    }

    // Parent.
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    ProcessResult result;
    bool out_open = true;
    bool err_open = true;
    while (out_open || err_open) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        int rc = ::poll(fds, nfds, -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (nfds_t i = 0; i < nfds; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            if (fds[i].fd == out_pipe[0]) {
                drain(out_pipe[0], result.out, out_open);
            } else {
                drain(err_pipe[0], result.err, err_open);
            }
        }
    }
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) {
            throw RepoAccessError(std::string("waitpid failed: ") +
                                  std::strerror(errno));
        }
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.term_signal = WTERMSIG(status);
    }
    return result;
}

}  // namespace csent
