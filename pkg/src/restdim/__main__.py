from restdim.cli import main

main()
