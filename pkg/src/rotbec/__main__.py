from .io_cli.main import main

main()
