#include <aggprop/cli.hpp>

int main(int argc, char** argv)
{
    return aggprop::cli::run(argc, argv);
}
