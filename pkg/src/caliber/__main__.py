from caliber.cli import main

main()
