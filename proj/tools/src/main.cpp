// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace randlock;
    CLI::App app{"randlock: OP_RAND emulation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "randlock 0.1.0");

    int code = cli::kOk;
    cli::add_demo(app, code);
    cli::add_replay(app, code);
    cli::add_fairness(app, code);
    cli::add_ledger(app, code);
    cli::add_trace(app, code);
    cli::add_play(app, code);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::BadConfig || e.code() == Errc::PortInUse) return cli::kUsage;
        return cli::kAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
